#![no_main]
use std::sync::Arc;

use geq_core::group::builtin;
use geq_core::smallcanc::{parse_fp_word, parse_lambda};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let q = Arc::new(builtin("S3").unwrap());
    let _ = parse_fp_word(text, &q);
    let _ = parse_lambda(text);
});
