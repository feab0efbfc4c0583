//! End-to-end tests of the `milnor` binary: exit codes, JSON determinism,
//! and a few pinned outputs.

use std::process::{Command, Output};

fn milnor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_milnor"))
        .args(args)
        .output()
        .expect("failed to spawn the binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn json_output_is_byte_deterministic() {
    let args = [
        "--char", "5", "--seed", "7", "--json", "invariants", "Y^2 - X^3",
    ];
    let a = milnor(&args);
    let b = milnor(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["char"], 5);
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["results"]["mu"], 2);
    assert_eq!(doc["results"]["tau"], 2);
}

#[test]
fn exit_code_two_on_parse_error() {
    let out = milnor(&["invariants", "Y^2 -- X^"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_one_on_domain_error() {
    // reducible input: the branch analysis must reject it
    let out = milnor(&["--char", "5", "semigroup", "X*Y"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn examples_single_row_filter() {
    let out = milnor(&["examples", "--only", "1.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1.1"));
    assert!(text.contains("PASS"));
    assert!(!text.contains("5.11"));
}

#[test]
fn examples_self_test_failure_is_nonzero() {
    let out = milnor(&["examples", "--only", "1.1", "--self-test-fail"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn pinned_invariants_genus_two() {
    let out = milnor(&[
        "--char", "5", "--json", "invariants", "(Y^2-X^3)^2 - Y*X^11",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["mu"], 41);
    assert_eq!(doc["results"]["tilde_mu"], 30);
}

#[test]
fn pinned_intersection_with_partial() {
    let out = milnor(&[
        "--char", "13", "--tprec", "640", "--json", "intersect",
        "(Y^9 - X^13)^2 - X^32*Y", "f_Y",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["intersection"], 509);
}

#[test]
fn pinned_semigroup() {
    let out = milnor(&[
        "--char", "13", "--tprec", "640", "--json", "semigroup",
        "(Y^9 - X^13)^2 - X^32*Y",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["generators"], serde_json::json!([18, 26, 301]));
    assert_eq!(doc["results"]["conductor"], 492);
}

#[test]
fn pinned_stability() {
    let out = milnor(&[
        "--char", "5", "--lmax", "4", "--json", "stability",
        "(Y^2 - X^3 + X^2*Y)^2 - Y*X^11",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["stability"]["stable"], 3);
}

#[test]
fn pinned_qpoly_certificate() {
    let out = milnor(&["--char", "5", "--json", "qpoly", "Y^2 - X^3", "--s", "4"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["value"], 4 + 2 - 1);
    assert_eq!(doc["results"]["degree_ok"], true);
    assert_eq!(doc["results"]["value_ok"], true);
    assert_eq!(doc["results"]["in_jacobian"], true);
}

#[test]
fn fibration_witness_reported() {
    let out = milnor(&["--char", "3", "--json", "fibration", "X^2*Y + Y^2*X"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["verdict"], "not_smoothing");
    assert!(doc["results"]["witness_factor"].is_string());
}
