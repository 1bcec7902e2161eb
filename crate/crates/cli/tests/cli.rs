//! Runs the `compers` binary on the shipped fixtures.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn compers(args: &[&str], envs: &[(&str, &str)]) -> (i32, Value, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_compers"));
    cmd.args(args).env_remove("COMPERS_ISO_BUDGET").env_remove("COMPERS_ENUM_BUDGET");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(stdout.trim()).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, stdout)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_component_structure() {
    let (code, r, _) = compers(&["check", path(&fixture("merging_sources.json"))], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["kind"], "Component");
    assert_eq!(r["minimal_generator"], Value::Null);
    assert_eq!(r["seed"], 0);
    assert_eq!(r["budgets"]["idempotent_search"], 64);
    assert_eq!(r["budgets"]["enumeration"], 1_000_000);
}

#[test]
fn check_rejects_a_non_commuting_square() {
    let (code, r, _) = compers(&["check", path(&fixture("diamond_tampered.json"))], &[]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "rejected");
    assert_eq!(r["witness"]["lower"], "bot");
    assert_eq!(r["witness"]["upper"], "top");
}

#[test]
fn malformed_input_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(compers(&["check", path(&bad)], &[]).0, 3);
    assert_eq!(compers(&["check", path(&dir.path().join("missing.json"))], &[]).0, 3);
    assert_eq!(compers(&["check", path(&fixture("diamond.json")), "--field", "GF:4"], &[]).0, 3);
    assert_eq!(compers(&["frobnicate"], &[]).0, 3);
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        vec!["decompose", "golden_star.json"],
        vec!["endo", "jordan_star_m2_q.json"],
        vec!["realize", "six_point_component.json"],
        vec!["encode", "diamond.json"],
    ] {
        let file = fixture(args[1]);
        let run = || compers(&[args[0], path(&file), "--seed", "5"], &[]).2;
        let first = run();
        assert_eq!(first, run(), "{args:?}");
        assert!(first.contains("\"seed\":5"));
    }
}

#[test]
fn h0_of_the_merging_pair() {
    let (code, r, _) = compers(&["h0", path(&fixture("merging_pair.json"))], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["module"]["maps"]["p->q"], serde_json::json!([["1", "1"]]));
}

#[test]
fn realize_then_h0_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let complex = dir.path().join("six.complex.json");
    let (code, _, _) = compers(&["realize", path(&fixture("six_point_component.json")), "--out", path(&complex)], &[]);
    assert_eq!(code, 0);
    let module = dir.path().join("six.h0.json");
    assert_eq!(compers(&["h0", path(&complex), "--out", path(&module)], &[]).0, 0);
    let (code, r, _) = compers(&["check", path(&module)], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["kind"], "Component");
    assert_eq!(r["dims"], serde_json::json!({"x": 1, "a": 2, "b": 2, "c": 3, "d": 2, "z": 1}));
}

#[test]
fn empty_complex_gives_zero_module() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.json");
    std::fs::write(&f, r#"{"poset": {"elements": ["a", "b"], "covers": [["a", "b"]]}, "levels": {}}"#).unwrap();
    let (code, r, _) = compers(&["h0", path(&f)], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["module"]["dims"], serde_json::json!({"a": 0, "b": 0}));
}

#[test]
fn split_writes_both_summands() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r, _) = compers(&["split", path(&fixture("six_point_component.json")), "--out", path(dir.path())], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["sum_isomorphic_to_input"], true);
    let semi = std::fs::read_to_string(dir.path().join("six_point_component_semi.json")).unwrap();
    let expected = std::fs::read_to_string(fixture("six_point_semi.json")).unwrap();
    let a: Value = serde_json::from_str(&semi).unwrap();
    let b: Value = serde_json::from_str(&expected).unwrap();
    assert_eq!(a, b);
    assert!(dir.path().join("six_point_component_interval.json").exists());
    // no minimal generator
    assert_eq!(compers(&["split", path(&fixture("merging_sources.json")), "--out", path(dir.path())], &[]).0, 2);
}

#[test]
fn extend_matches_the_extension_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let (code, _, _) = compers(&["extend", path(&fixture("star_semi.json")), "--out", path(&out)], &[]);
    assert_eq!(code, 0);
    let got: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want: Value = serde_json::from_str(&std::fs::read_to_string(fixture("star_extension.json")).unwrap()).unwrap();
    assert_eq!(serde_json::to_string(&got).unwrap(), serde_json::to_string(&want).unwrap());
}

#[test]
fn idempotent_command_accepts_the_golden_idempotent() {
    let (code, r, _) = compers(
        &["idempotent", path(&fixture("golden_star.json")), path(&fixture("golden_idempotent.json"))],
        &[],
    );
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["kernel_dims"], serde_json::json!([2, 1, 1, 1, 1]));
    assert_eq!(r["image_dims"], serde_json::json!([2, 1, 1, 1, 1]));
    // a transformation written for a different module is rejected
    let (code, _, _) = compers(
        &["idempotent", path(&fixture("golden_star.json")), path(&fixture("six_point_idempotent.json"))],
        &[],
    );
    assert_ne!(code, 0);
}

#[test]
fn encode_produces_a_valid_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("enc.json");
    let (code, r, _) = compers(&["encode", path(&fixture("diamond.json")), "--out", path(&out)], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["valid"], true);
    assert_eq!(r["encoding"]["bounds"], serde_json::json!([3, 3]));
    assert!(out.exists());
    // unbounded input gets bounds adjoined
    let (code, r, _) = compers(&["encode", path(&fixture("merging_sources.json"))], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["bounds_adjoined"], true);
}

#[test]
fn pregrade_and_enumerate() {
    let (code, r, _) = compers(&["pregrade", path(&fixture("diamond.json"))], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["grades"], serde_json::json!({"bot": 0, "l": 1, "r": 1, "top": 2}));
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    std::fs::write(&chain, r#"{"elements": ["a", "b"], "covers": [["a", "b"]]}"#).unwrap();
    let (code, r, _) = compers(&["enumerate", path(&chain), "--dims", "1,1", "--kind", "semi"], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["count"], 2);
    let (code, r, _) = compers(&["enumerate", path(&chain), "--dims", "a=2,b=1"], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["count"], 1);
}

#[test]
fn budgets_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    std::fs::write(&chain, r#"{"elements": ["a", "b"], "covers": [["a", "b"]]}"#).unwrap();
    let (code, r, _) = compers(&["enumerate", path(&chain), "--dims", "3,3"], &[("COMPERS_ENUM_BUDGET", "10")]);
    assert_eq!(code, 4);
    assert_eq!(r["status"], "budget_exceeded");
    assert_eq!(r["budgets"]["enumeration"], 10);
    let (_, r, _) = compers(&["endo", path(&fixture("merging_sources.json"))], &[("COMPERS_ISO_BUDGET", "3")]);
    assert_eq!(r["budgets"]["idempotent_search"], 3);
}

#[test]
fn field_override_and_pretty_output() {
    let (code, r, _) = compers(&["check", path(&fixture("six_point_component.json")), "--field", "GF:7"], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["field"], "GF(7)");
    let (_, _, text) = compers(&["check", path(&fixture("diamond.json")), "--format", "pretty"], &[]);
    assert!(text.contains("\n  \"budgets\""));
}
