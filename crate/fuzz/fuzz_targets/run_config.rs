// SPDX-License-Identifier: Apache-2.0
#![no_main]

use expik::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json_str(text) {
        assert!(cfg.builtin.is_some() != cfg.external.is_some());
        let again = RunConfig::from_json_str(&cfg.to_json().to_string()).expect("serialized config parses");
        assert_eq!(again, cfg);
    }
});
