#![no_main]

use libfuzzer_sys::fuzz_target;
use sect_core::io::pgm::parse_pgm;

fuzz_target!(|data: &[u8]| {
    if let Ok(image) = parse_pgm(data) {
        assert_eq!(image.samples.len(), image.width * image.height);
        assert!(image.maxval >= 1);
        assert!(image.samples.iter().all(|&v| v <= image.maxval));
    }
});
