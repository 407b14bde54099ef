use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn msdual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msdual")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("msdual-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn algebra_json_lists_the_carrier() {
    let out = msdual(&["algebra", "Z", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["carrier"], serde_json::json!([-2, -1, 1, 2]));
}

#[test]
fn algebra_without_size_is_an_error() {
    let out = msdual(&["algebra", "W"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("needs a size"));
}

#[test]
fn free_algebra_agrees_with_oracle() {
    let out = msdual(&["free", "kleene", "1", "--oracle"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["size"], 6);
    assert_eq!(v["oracle_size"], 6);
    assert_eq!(v["agrees"], true);
}

#[test]
fn free_algebra_respects_the_guard() {
    let out = msdual(&["free", "kleene", "--s", "2", "--guard-size", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn passing_verification_writes_reports() {
    let dir = scratch_dir("verify");
    let out = msdual(&[
        "verify", "duality", "separation", "--spec", "odd-alg,kleene", "--m", "2", "--s", "0..1", "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let claims = report["claims"].as_array().unwrap();
    assert!(!claims.is_empty());
    assert!(claims.iter().all(|c| c["status"] == "pass"));
    assert!(dir.join("summary.txt").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn failing_claim_sets_exit_code_one() {
    let out = msdual(&["verify", "tables", "--spec", "even-mon", "--m", "2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert!(v["claims"].as_array().unwrap().iter().any(|c| c["status"] == "fail"));
}

#[test]
fn unknown_check_is_an_error() {
    let out = msdual(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_empty_structure() {
    let out = msdual(&["export", "empty"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "digraph \"empty\" {\n  rankdir=BT;\n}\n");
}

#[test]
fn export_kleene_space_to_file() {
    let dir = scratch_dir("export");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("space.json");
    let out = msdual(&["export", "kleene-space", "--s", "1", "--format", "json", "--path", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn kleene_space_needs_a_kleene_spec() {
    let out = msdual(&["export", "kleene-space", "--spec", "odd-alg"]);
    assert_eq!(out.status.code(), Some(2));
}
