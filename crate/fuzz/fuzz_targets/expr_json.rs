// SPDX-License-Identifier: Apache-2.0
#![no_main]

use expik::gsource::Expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(e) = Expr::from_json_str(text) {
        let again = Expr::from_json(&e.to_json()).expect("serialized expression parses");
        assert_eq!(again.to_json(), e.to_json());
        let _ = e.eval(expik::Complex64::new(0.5, -0.25));
        let _ = e.taylor(0.0, 8);
    }
});
