// SPDX-License-Identifier: Apache-2.0
#![no_main]

use expik::linalg::mtx::{format_sparse, parse_sparse};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = parse_sparse(text) {
        // accepted input must survive a write/read cycle
        let again = parse_sparse(&format_sparse(&a)).expect("formatted matrix parses");
        assert_eq!(again.n(), a.n());
        assert_eq!(again.nnz(), a.nnz());
    }
});
