// SPDX-License-Identifier: Apache-2.0
#![no_main]

use expik::config::ExternalFiles;
use expik::gsource::Expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(files) = ExternalFiles::from_json_str(text) {
        for term in &files.source {
            let _ = Expr::from_json(&term.profile);
        }
    }
});
