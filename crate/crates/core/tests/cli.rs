use std::path::Path;
use std::process::{Command, Output};

use krr_core::harness::{read_json_output, CSV_HEADER};

const SMALL: &str = r#"{
    "kernel": {"type": "taylor", "coefficients": [1, 1, 0.5]},
    "teacher": {"type": "polynomial", "coefficients": [0, 1, 0.5], "noise_sigma": 0.2},
    "phase": 1, "dimension": 25, "lambda": 0.01,
    "deltas": [1, 2], "trials": 2, "master_seed": 5
}"#;

fn krr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn theory_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out = krr(&["theory", "--config", &cfg, "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(out.stderr.is_empty());
}

#[test]
fn simulate_json_file_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let path = dir.path().join("o.json");
    let out = krr(&[
        "simulate", "--config", &cfg, "--format", "json", "--out", path.to_str().unwrap(), "--seed", "11",
        "--workers", "3", "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json_output(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc.config.unwrap().master_seed, 11);
    assert_eq!(doc.rows.len(), 2 * (1 + 2 + 1));
}

#[test]
fn coeffs_emits_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let out = krr(&["coeffs", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dimension"], 25);
    assert_eq!(v["n"], 25);
}

#[test]
fn mp_and_ge_checks_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &SMALL.replace("\"master_seed\": 5", "\"master_seed\": 5, \"mp_n\": 200"));
    let mp = krr(&["mp-check", "--config", &cfg, "--quiet"]);
    assert_eq!(mp.status.code(), Some(0));
    assert!(String::from_utf8(mp.stdout).unwrap().contains("mp_aggregate"));
    let ge = krr(&["ge-check", "--config", &cfg, "--quiet"]);
    assert_eq!(ge.status.code(), Some(0));
    assert!(String::from_utf8(ge.stdout).unwrap().contains("aggregate_surrogate"));
}

#[test]
fn recipe_show_and_unknown() {
    let out = krr(&["recipe", "fig1-k2", "--show"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["phase"], 2);
    assert_eq!(krr(&["recipe", "fig1-k9"]).status.code(), Some(1));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", &SMALL.replace("\"lambda\": 0.01", "\"lambda\": 0"));
    let out = krr(&["sweep", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("ridgeless"));
    assert_eq!(krr(&["sweep"]).status.code(), Some(1));
    assert_eq!(krr(&["sweep", "--config", "/nonexistent.json"]).status.code(), Some(1));
}

#[test]
fn assumption_violation_exits_one() {
    // a kernel that vanishes on degree 1 violates non-degeneracy at K = 1
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &SMALL.replace("\"coefficients\": [1, 1, 0.5]}", "\"coefficients\": [1, 0, 0.5]}"),
    );
    let out = krr(&["theory", "--config", &cfg, "--quiet"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("non-degeneracy"));
}

#[test]
fn partial_failure_exits_three() {
    // the surrogate cap makes every surrogate trial fail; kernel trials succeed
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        &SMALL.replace("\"master_seed\": 5", "\"master_seed\": 5, \"surrogate_cap\": 10, \"modes\": {\"ge\": true}"),
    );
    let out = krr(&["sweep", "--config", &cfg, "--quiet"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains(",failed,"));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SMALL);
    let one = krr(&["simulate", "--config", &cfg, "--workers", "1", "--quiet"]).stdout;
    let many = krr(&["simulate", "--config", &cfg, "--workers", "6", "--quiet"]).stdout;
    assert_eq!(one, many);
}
