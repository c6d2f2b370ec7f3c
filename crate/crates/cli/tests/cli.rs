use std::path::Path;
use std::process::{Command, Output};

fn lame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lame"))
        .args(args)
        .env_remove("LAME_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let o = lame(&[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_succeeds() {
    let o = lame(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("recover"));
}

#[test]
fn unknown_flag_is_a_validation_error() {
    let o = lame(&["coeffs", "--n", "2", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["stage"], "arguments");
}

#[test]
fn symbol_check_passes() {
    let o = lame(&["symbol-check", "--n", "3", "--draws", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["max_rel_err"].as_f64().unwrap() < 1e-10);
}

#[test]
fn coeffs_reports_signed_boundary_density() {
    let o = lame(&["coeffs", "--n", "1", "--tau", "1", "--mu", "-0.5", "--bc", "neumann"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["a1_density"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn invalid_parameters_exit_with_validation_code() {
    let o = lame(&["coeffs", "--n", "2", "--tau", "1", "--mu", "-2"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert!(e["message"].as_str().unwrap().contains("Lame"));
    assert!(!e["hint"].as_str().unwrap().is_empty());
}

#[test]
fn disk_oracle_then_recover_against_truth() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("disk.json");
    let truth = dir.path().join("truth.json");
    let plot = dir.path().join("fit.svg");
    let o = lame(&["oracle-disk", "--R", "1", "--lambda-max", "6000", "--out", path(&spec)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(&truth, r#"{"schema_version": 1, "domain": {"kind": "disk", "radius": 1.0}}"#).unwrap();
    let o = lame(&[
        "recover",
        "--spectrum",
        path(&spec),
        "--truth",
        path(&truth),
        "--plot",
        path(&plot),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["volume_rel_err"].as_f64().unwrap().abs() < 0.05);
    assert!(v["fit"]["a1_hat"].as_f64().unwrap() < 0.0);
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));

    let o = lame(&["weyl", "--spectrum", path(&spec), "--points", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("eta,count,"));
}

#[test]
fn audit_ball_on_interval_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("interval.json");
    let o = lame(&["oracle-interval", "--length", "2", "--k", "500", "--out", path(&spec)]);
    assert_eq!(o.status.code(), Some(0));
    let o = lame(&["audit-ball", "--spectrum", path(&spec)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // every interval is a 1-ball
    assert_eq!(v["is_ball"], true);
}

#[test]
fn missing_schema_version_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(&spec, r#"{"dim": 1, "bc": "dirichlet", "tau": 1, "mu": 0, "eigenvalues": [1, 4, 9]}"#).unwrap();
    let o = lame(&["trace-fit", "--spectrum", path(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["stage"], "input");
    assert!(e["message"].as_str().unwrap().contains("schema_version"));
}

#[test]
fn too_few_eigenvalues_give_empty_window() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("short.json");
    assert_eq!(
        lame(&["oracle-interval", "--length", "1", "--k", "10", "--out", path(&spec)]).status.code(),
        Some(0)
    );
    let o = lame(&["trace-fit", "--spectrum", path(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["stage"], "window");
}

#[test]
fn two_levels_are_rejected() {
    let o = lame(&["eigs", "--domain", "square:1", "--k", "4", "--levels", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eigs_are_deterministic() {
    let args = ["eigs", "--domain", "rect:1,0.5", "--k", "6", "--h", "0.1"];
    let a = lame(&args);
    let b = lame(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 6);
}

#[test]
fn mesh_text_output_and_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_lame"))
        .args(["mesh", "--domain", "disk:1", "--h", "0.3", "--text", "--out", "m.txt"])
        .env("LAME_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("m.txt")).unwrap();
    assert!(!text.is_empty());
}
