use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn s3min(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s3min")).args(args).env_remove("S3MIN_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn build_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut a = vec!["build", "--variant", "odd", "--m", "2", "--ell", "1", "--refine", "2", "--out", out];
    a.extend_from_slice(extra);
    a
}

#[test]
fn build_odd_reports_genus_nine() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = s3min(&build_args(out, &["--format", "ply4,csv4,ply3-stereo"]));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout_json(&o);
    assert_eq!(report["genus"], 9);
    assert_eq!(report["euler"], -16);
    assert_eq!(report["copies"], 32);
    assert_eq!(report["schema_version"], 1);
    assert!(report["pole"].is_array());
    for suffix in ["ply", "csv", "stereo.ply", "report.json", "convergence.json"] {
        assert!(dir.path().join(format!("odd_m2_l1_n2.{suffix}")).exists(), "{suffix}");
    }
    let written: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("odd_m2_l1_n2.report.json")).unwrap()).unwrap();
    assert_eq!(written, report);

    // the exported mesh verifies on its own
    for file in ["odd_m2_l1_n2.ply", "odd_m2_l1_n2.csv"] {
        let p = dir.path().join(file);
        let v = s3min(&["verify", p.to_str().unwrap(), "--m", "2", "--ell", "1"]);
        assert_eq!(code(&v), 0, "{file}");
        let r = stdout_json(&v);
        assert_eq!(r["genus"], 9);
        assert_eq!(r["embedded"], true);
    }

    let summary = s3min(&["report", out]);
    assert_eq!(code(&summary), 0);
    let s = stdout_json(&summary);
    assert_eq!(s["reports"].as_array().unwrap().len(), 1);
    assert_eq!(s["passed"], true);
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = s3min(&build_args(d.path().to_str().unwrap(), &["--deterministic", "--seed", "7", "--format", "ply4,ply3-stereo,csv4"]));
        assert_eq!(code(&o), 0);
    }
    let names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 5);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let even = s3min(&["build", "--variant", "even", "--m", "2", "--ell", "1", "--out", out]);
    assert_eq!(code(&even), 2);
    assert!(String::from_utf8_lossy(&even.stderr).contains("ℓ ≥ 2"));
    assert_eq!(code(&s3min(&["build", "--m", "1", "--ell", "1", "--out", out])), 2);
    assert_eq!(code(&s3min(&["build", "--m", "2", "--ell", "1", "--format", "obj", "--out", out])), 2);
    assert_eq!(code(&s3min(&["build", "--m", "2"])), 2);
    assert_eq!(code(&s3min(&["frobnicate"])), 2);
    assert_eq!(code(&s3min(&["report", out])), 2);
    let threads = Command::new(env!("CARGO_BIN_EXE_s3min"))
        .args(["verify", "missing.ply"])
        .env("S3MIN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&threads), 2);
}

#[test]
fn solver_failure_exits_one_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let o = s3min(&build_args(dir.path().to_str().unwrap(), &["--max-iters", "1"]));
    assert_eq!(code(&o), 1);
    let d = stdout_json(&o);
    assert_eq!(d["kind"], "not_converged");
    assert_eq!(d["params"]["m"], 2);
    assert!(dir.path().join("odd_m2_l1_n2.diagnostic.json").exists());
}

#[test]
fn verify_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ply");
    fs::write(&bad, "ply\nformat ascii 1.0\nend_header\n").unwrap();
    assert_eq!(code(&s3min(&["verify", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&s3min(&["verify", Path::new("/nonexistent/x.csv").to_str().unwrap()])), 1);
}

#[test]
fn config_dump_prints_configuration() {
    let o = s3min(&["config-dump", "--m", "2", "--ell", "1"]);
    assert_eq!(code(&o), 0);
    let c = stdout_json(&o);
    assert_eq!(c["m"], 2);
    assert_eq!(c["k"], 4);
    assert_eq!(code(&s3min(&["config-dump", "--m", "0", "--ell", "1"])), 2);
}
