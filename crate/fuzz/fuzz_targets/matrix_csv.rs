#![no_main]

use libfuzzer_sys::fuzz_target;
use sect_core::io::matrix::{format_matrix_csv, parse_matrix_csv, MatrixFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(parsed) = parse_matrix_csv(text) else {
        return;
    };
    // Anything that parses must survive a format/parse round trip with
    // values and levels bit-identical and directions within tolerance.
    let formatted = format_matrix_csv(&parsed);
    let reparsed = parse_matrix_csv(&formatted).expect("formatted output must parse");
    assert!(parsed
        .direction_grid()
        .approx_eq(reparsed.direction_grid()));
    assert_eq!(
        parsed.level_grid().levels(),
        reparsed.level_grid().levels()
    );
    match (&parsed, &reparsed) {
        (MatrixFile::Ect(a), MatrixFile::Ect(b)) => assert_eq!(a.values(), b.values()),
        (MatrixFile::Sect(a), MatrixFile::Sect(b)) => assert_eq!(a.values(), b.values()),
        _ => panic!("mode flipped in round trip"),
    }
});
