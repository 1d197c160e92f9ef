#![no_main]
use geq_core::quasi::{parse_qi, parse_relator};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_qi(text);
        let _ = parse_relator(text);
    }
});
