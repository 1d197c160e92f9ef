#![no_main]
use std::sync::Arc;

use geq_core::equations::parse_system;
use geq_core::group::builtin;
use geq_core::words::{parse_equations, parse_word};
use libfuzzer_sys::fuzz_target;

// first byte picks the coefficient group
fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let name = ["Z1", "Z4", "S3", "D4", "Q8", "A5"][pick as usize % 6];
    let g = Arc::new(builtin(name).unwrap());
    let _ = parse_word(text, &g);
    let _ = parse_equations(text, &g);
    let _ = parse_system(text, &g);
});
