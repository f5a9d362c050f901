use std::path::Path;
use std::process::{Command, Output};

fn spinc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinc"))
        .args(args)
        .env_remove("SPINC_CONFIG")
        .output()
        .expect("spinc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn symbolic_b1_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("b1.json");
    let csv = dir.path().join("b1.csv");
    let out = spinc(&["symbolic-b1", "--json-out", path(&json), "--csv-out", path(&csv)]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("[ok] coefficient-unitary"));
    assert!(text.contains("PASS flat-b1"));
    assert!(text.ends_with("status: PASS\n"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["status"], "PASS");
    assert_eq!(doc["command"], "symbolic-b1");
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["ruleset_hash"].as_str().unwrap().len(), 64);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("check-name,parameter-string,measured,expected,tolerance,pass\n"));
    assert!(!table.contains(",false\n"));
}

#[test]
fn corrupted_rules_fail_with_both_forms() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("bad.rules");
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/identities.rules")).unwrap();
    let bad = text.replace("rhs = -1i NJ(h1,h3,h5) NJ(a2,a4,a5)", "rhs = 1i NJ(h1,h3,h5) NJ(a2,a4,a5)");
    assert_ne!(bad, text);
    std::fs::write(&rules, bad).unwrap();
    let out = spinc(&["symbolic-b1", "--rules", path(&rules)]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let first = text.lines().position(|l| l.starts_with("[MISMATCH]")).expect("a mismatching step");
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[first + 1].trim_start().starts_with("computed:"));
    assert!(lines[first + 2].trim_start().starts_with("expected:"));
    assert!(text.ends_with("status: FAIL\n"));

    let ids = spinc(&["check-identities", "--rules", path(&rules)]);
    assert_eq!(ids.status.code(), Some(1));
    assert!(stdout(&ids).contains("FAIL rule:nnj-mixed-to-nj-squared"));
}

#[test]
fn check_identities_passes() {
    let out = spinc(&["check-identities", "--instances", "20"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n = 1\ncolour = blue\n").unwrap();
    let out = spinc(&["symbolic-b1", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown config key `colour`"));
}

#[test]
fn invalid_values_are_rejected() {
    for args in [["--cutoff", "0"], ["--a", "2pi,0"], ["--tol", "-1"]] {
        let out = spinc(&["model-spectrum", args[0], args[1]]);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_from_environment_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let json = dir.path().join("torus.json");
    std::fs::write(&cfg, "# torus demo\nflux = 1, 2\ngrid = 40\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spinc"))
        .args(["torus-gap", "--flux", "1", "--json-out", path(&json)])
        .env("SPINC_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["config"]["grid"], "40");
    assert_eq!(doc["config"]["flux"], "1");
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = spinc(&["torus-gap", "--flux", "1,2", "--json-out", path(p)]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn coarse_torus_grid_fails() {
    let out = spinc(&["torus-gap", "--flux", "4", "--grid", "12"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL torus-gap [p=4 m=12]"));
    assert!(text.contains("resolution error"));
}

#[test]
fn mixed_sign_model_spectrum_passes() {
    let out = spinc(&["model-spectrum", "--a=-2pi", "--cutoff", "20", "--trials", "20"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS l02-kernel-leakage"));

    let out = spinc(&["model-spectrum", "--a", "-2pi,4pi", "--trials", "20"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS omega-tau") && text.contains("actual 1.88495559215e1"));
    assert!(text.contains("PASS omega-mu0") && text.contains("actual 6.28318530718e0"));
}

#[test]
fn model_kernels_pass() {
    let out = spinc(&["model-kernels"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(stdout(&out).matches("PASS mehler-vs-matrix").count(), 4);
}
