#![no_main]

use libfuzzer_sys::fuzz_target;
use sect_core::io::config::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = parse_config(text) {
        // Accepted keys are never empty and never duplicated.
        assert!(map.keys().all(|k| !k.is_empty()));
    }
});
