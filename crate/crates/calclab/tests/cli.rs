use std::path::PathBuf;
use std::process::Command;

use calclab::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_calclab"))
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("calclab-cli-{}-{name}", std::process::id()))
}

#[test]
fn weights_sanity_passes_with_json_report() {
    let out = temp("ws.json");
    let status = bin().args(["verify", "--suite", "weights-sanity", "--n", "64", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let report = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.passed());
    assert!(report.checks.iter().all(|c| !c.anchor.is_empty()));
    let ones = report.checks.iter().find(|c| c.name == "weights/all-ones").unwrap();
    assert_eq!(ones.constant, 0.0);
    std::fs::remove_file(out).unwrap();
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = bin().args(["verify", "--suite", "bogus"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn reports_are_deterministic_and_csv_has_six_columns() {
    let run = |name: &str, format: &str| {
        let out = temp(name);
        let status = bin()
            .args(["verify", "--suite", "decompositions", "--n", "256", "--seed", "3", "--format", format, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let text = std::fs::read_to_string(&out).unwrap();
        std::fs::remove_file(out).unwrap();
        text
    };
    let a = Report::from_json(&run("a.json", "json")).unwrap().without_runtimes();
    let b = Report::from_json(&run("b.json", "json")).unwrap().without_runtimes();
    assert_eq!(a.to_json(), b.to_json());
    let csv = run("c.csv", "csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "name,anchor,constant,threshold,passed,runtime_s");
    let back = Report::from_csv(&csv).unwrap();
    assert_eq!(back.checks.len(), a.checks.len());
}

#[test]
fn eval_writes_x_value_rows() {
    let cfg = temp("eval.json");
    std::fs::write(&cfg, r#"{"m": 1, "n_cells": 64, "seed": 5, "points": [-1.0, 0.0, 0.5]}"#).unwrap();
    let out = bin().args(["eval", "--op", "commutator_A", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,value");
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let v: Vec<f64> = r.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(v[1].is_finite());
    }
    let bad = bin().args(["eval", "--op", "nope", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    std::fs::remove_file(cfg).unwrap();
}

#[test]
fn verify_exit_code_reflects_failures() {
    // Exit code 0 exactly when every check passed.
    let out = temp("end.json");
    let status = bin().args(["verify", "--suite", "endpoint", "--n", "256", "--out"]).arg(&out).status().unwrap();
    let report = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(status.success(), report.passed());
    std::fs::remove_file(out).unwrap();
}
