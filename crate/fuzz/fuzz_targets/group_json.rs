#![no_main]
use geq_core::group::io::parse_group_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_group_json(text);
    }
});
