use std::fs;
use std::process::{Command, Output};

fn selfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfsim")).args(args).env("SELFSIM_WORKERS", "2").output().unwrap()
}

#[test]
fn golden_mean_fundamental_passes() {
    let out = selfsim(&["fundamental", "--system", "golden-mean", "--lambda", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = &report["checks"][0]["values"];
    assert!((v["capacity"].as_f64().unwrap() - 1.3885).abs() < 1e-3);
    assert!((v["entropy_over_log_lambda"].as_f64().unwrap() - 1.3885).abs() < 1e-3);
    assert_eq!(report["config"]["seed"], serde_json::json!(selfsim::experiment::DEFAULT_SEED));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"system": {"kind": "golden-mean", "lambda": 0.5}, "command": "verify"}"#).unwrap();
    let out = selfsim(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("λ must exceed 1"));

    fs::write(&cfg, "").unwrap();
    let out = selfsim(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`system`"));
}

#[test]
fn failing_check_exits_one() {
    let out = selfsim(&["measure", "--system", "repeller-attractor"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("measure: transition matrix is not primitive"));
}

#[test]
fn artifacts_are_written_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = selfsim(&[
            "all", "--system", "golden-mean", "--seed", "7", "--format", "json,csv", "--out", d.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let strip = |p: &std::path::Path| {
        let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("report.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_clock_ms");
        v["config"]["output"]["dir"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    let covers = fs::read_to_string(a.join("capacity_covers.csv")).unwrap();
    assert!(covers.starts_with("# selfsim-csv v1 covers\neps,count,ln_count,method\n"));
    assert_eq!(fs::read_to_string(a.join("entropy_growth.csv")).unwrap(), fs::read_to_string(b.join("entropy_growth.csv")).unwrap());
}

#[test]
fn toral_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    fs::write(&m, "2 1\n1 1\n").unwrap();
    let out = selfsim(&["verify", "--system", "toral", "--matrix", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    fs::write(&m, "[[1, 1], [0, 1]]").unwrap();
    let out = selfsim(&["verify", "--system", "toral", "--matrix", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
