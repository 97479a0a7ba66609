// SPDX-License-Identifier: Apache-2.0
#![no_main]

use expik::linalg::mtx::{format_vector, parse_vector};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_vector(text) {
        let again = parse_vector(&format_vector(v.as_slice())).expect("formatted vector parses");
        assert_eq!(again.len(), v.len());
    }
});
