//! End-to-end runs of the installed binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_screenlasso"))
}

#[test]
fn gen_toy_then_solve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("toy.csv");
    let out = bin()
        .args(["gen-toy", "--n", "30", "--d", "40", "--p", "3", "--sigma", "1.0"])
        .args(["--seed", "11", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(csv.exists());

    let out = bin()
        .args(["solve", "--data"])
        .arg(&csv)
        .args(["--penalty", "mcp", "--lambda", "5.0", "--theta", "3.0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["points"][0]["status"], "ok");
}

#[test]
fn path_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("path.csv");
    let out = bin()
        .args(["path", "--toy", "--toy-n", "25", "--toy-d", "30", "--toy-p", "3"])
        .args(["--toy-sigma", "1.0", "--seed", "3", "--penalty", "logsum"])
        .args(["--thetas", "0.1,1", "--n-lambdas", "5", "--format", "csv", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 11); // header + 2 thetas x 5 lambdas
    assert!(text.starts_with("schema_version,solver,penalty"));
}

#[test]
fn solver_flags_change_the_effective_solver() {
    let out = bin()
        .args(["solve", "--toy", "--toy-n", "20", "--toy-d", "20", "--toy-p", "2"])
        .args(["--toy-sigma", "0.5", "--penalty", "logsum", "--lambda", "1.0"])
        .args(["--theta", "1.0", "--no-propagation"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["solver"], "mm-genuine");

    let out = bin()
        .args(["solve", "--toy", "--toy-n", "20", "--toy-d", "20", "--toy-p", "2"])
        .args(["--toy-sigma", "0.5", "--penalty", "logsum", "--lambda", "1.0"])
        .args(["--theta", "1.0", "--no-screen"])
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["solver"], "mm-noscreen");

    let out = bin()
        .args(["solve", "--toy", "--toy-n", "20", "--toy-d", "20", "--toy-p", "2"])
        .args(["--toy-sigma", "0.5", "--penalty", "logsum", "--lambda", "1.0"])
        .args(["--theta", "1.0", "--paper-radius"])
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["radius"], "compact");
    assert_eq!(doc["points"][0]["status"], "ok");
}

#[test]
fn missing_data_source_is_an_error() {
    let out = bin()
        .args(["solve", "--penalty", "logsum", "--lambda", "1.0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("exactly one data source"), "stderr: {err}");
}

#[test]
fn bad_file_reports_context() {
    let out = bin()
        .args(["solve", "--data", "/does/not/exist.csv", "--lambda", "1.0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("exist.csv"), "stderr: {err}");
}
