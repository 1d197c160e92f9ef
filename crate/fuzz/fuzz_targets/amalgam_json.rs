#![no_main]
use geq_core::amalgam::{parse_amalgam_json, parse_two_factor_word_json};
use geq_core::claims::sample_amalgams;
use libfuzzer_sys::fuzz_target;

// the same text is tried as an amalgam file and as a word in a fixed amalgam
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_amalgam_json(text);
    for (_, am) in sample_amalgams().unwrap() {
        let _ = parse_two_factor_word_json(text, &am);
    }
});
