// SPDX-License-Identifier: Apache-2.0

//! Replays the checked-in fuzz seeds through the properties the fuzz
//! targets assert, so the seeds stay valid inputs.

use std::fs;
use std::path::PathBuf;

use expik::config::{ExternalFiles, RunConfig};
use expik::gsource::Expr;
use expik::linalg::mtx::{format_sparse, format_vector, parse_sparse, parse_vector};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn sparse_seeds_round_trip() {
    for (name, text) in seeds("mtx_sparse") {
        let a = parse_sparse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = parse_sparse(&format_sparse(&a)).unwrap();
        assert_eq!(again.to_dense(), a.to_dense(), "{name}");
    }
}

#[test]
fn vector_seeds_round_trip() {
    for (name, text) in seeds("mtx_vector") {
        let v = parse_vector(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_vector(&format_vector(v.as_slice())).unwrap(), v, "{name}");
    }
}

#[test]
fn expression_seeds_round_trip() {
    for (name, text) in seeds("expr_json") {
        let e = Expr::from_json_str(&text).unwrap_or_else(|err| panic!("{name}: {err}"));
        assert_eq!(Expr::from_json(&e.to_json()).unwrap(), e, "{name}");
    }
}

#[test]
fn config_seeds_round_trip() {
    for (name, text) in seeds("run_config") {
        let cfg = RunConfig::from_json_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(RunConfig::from_json_str(&cfg.to_json().to_string()).unwrap(), cfg, "{name}");
    }
}

#[test]
fn bundle_seeds_parse() {
    for (name, text) in seeds("problem_bundle") {
        let files = ExternalFiles::from_json_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        for term in &files.source {
            Expr::from_json(&term.profile).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
