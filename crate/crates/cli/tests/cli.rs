use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

const UNIT: &str = r#"{"dim":1,"vertices":[[0],[1]]}"#;
const SQUARE: &str = r#"{"dim":2,"halfspaces":[{"normal":[1,0],"offset":1},{"normal":[-1,0],"offset":0},{"normal":[0,1],"offset":1},{"normal":[0,-1],"offset":0}]}"#;
const VEE: &str = r#"{"pieces":[{"gradient":[-1],"constant":0},{"gradient":[1],"constant":-1}]}"#;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mu-entropy-lab")).args(args).env("MU_LAB_THREADS", "1").output().unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = lab(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn vector_at_zero_is_minus_four_pi() {
    let v = json_ok(&["vector", "--polytope", UNIT, "--xi", "0", "--lambda", "0"]);
    assert!((v["value"].as_f64().unwrap() + 4.0 * PI).abs() < 1e-12);
    assert_eq!(v["convention"], "lattice-volume");
}

#[test]
fn scan_reports_transition() {
    let v = json_ok(&["scan-lambda", "--polytope", UNIT, "--steps", "40"]);
    let temp = v["transition_temperatures"][0].as_f64().unwrap();
    assert!((temp + 8.0 * PI).abs() < 1e-6, "{temp}");
    assert!((v["exact_transition"].as_f64().unwrap() - 8.0 * PI).abs() < 1e-9);
}

#[test]
fn scan_is_reproducible() {
    let a = lab(&["scan-lambda", "--polytope", SQUARE, "--steps", "8", "--seed", "3", "--format", "csv"]);
    let b = lab(&["scan-lambda", "--polytope", SQUARE, "--steps", "8", "--seed", "3", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("lambda,xi0,xi1,value,min_eig,branches,trivial_max_eig\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn na_entropy_grid_csv() {
    let out = lab(&["na-entropy", "--polytope", UNIT, "--q", VEE, "--grid", "tau=0:2:0.5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,mu,sigma,mu_lambda"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((first[1] + 4.0 * PI).abs() < 1e-12);
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn cna_maximum() {
    let v = json_ok(&["cna", "--polytope", UNIT, "--q", VEE, "--mna", "-1"]);
    let n2 = v["norm2"].as_f64().unwrap();
    assert!((n2 - 1.0 / 48.0).abs() < 1e-14);
    assert!((v["max_value"].as_f64().unwrap() - 2.0 * PI * PI / n2).abs() < 1e-9);
    assert_eq!(v["convention"], "donaldson-quadratic");
}

#[test]
fn metric_entropy_of_round_metric() {
    let v = json_ok(&["metric-entropy", "--a", "2", "--lambda", "-1"]);
    let want = -2.0 * PI + (-1.0) * (1.0 - 2f64.ln());
    assert!((v["mu_entropy"].as_f64().unwrap() - want).abs() < 1e-9);
    assert!((v["w_at_zero"].as_f64().unwrap() - want).abs() < 1e-9);
    assert_eq!(v["convention"], "cp1-chart");
}

#[test]
fn h_entropy_rejects_wrong_length() {
    assert_eq!(lab(&["h-entropy", "--a", "1"]).status.code(), Some(2));
    let v = json_ok(&["h-entropy", "--a", "2"]);
    assert!((v["h_entropy"].as_f64().unwrap() + 2.0 * PI * 2f64.ln()).abs() < 1e-9);
}

#[test]
fn ray_csv_columns() {
    let out = lab(&["ray", "--a", "1", "--q", VEE, "--tau", "1", "--lambda", "-1", "--tmax", "4", "--steps", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,W,c0,c1\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn schema_errors_exit_2() {
    assert_eq!(lab(&["vector", "--polytope", "{not json", "--xi", "0"]).status.code(), Some(2));
    assert_eq!(lab(&["vector", "--polytope", "/nonexistent/p.json", "--xi", "0"]).status.code(), Some(2));
    let positive = r#"{"pieces":[{"gradient":[1],"constant":0}]}"#;
    assert_eq!(lab(&["na-entropy", "--polytope", UNIT, "--q", positive]).status.code(), Some(2));
    assert_eq!(lab(&["metric-entropy", "--a", "1", "--lambda", "1"]).status.code(), Some(2));
    assert_eq!(lab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3_with_diagnostic() {
    let out = lab(&["na-entropy", "--polytope", UNIT, "--q", VEE, "--tau", "1e6"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "numeric-failure");
    assert_eq!(v["command"], "na-entropy");
}

#[test]
fn verify_subset_passes() {
    let out = lab(&["verify", "--only", "A2,A7,A8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 3);
    assert_eq!(lab(&["verify", "--only", "A11"]).status.code(), Some(2));
}

#[test]
fn threads_flag_and_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_mu-entropy-lab"))
        .args(["--threads", "2", "norm2", "--polytope", UNIT, "--q", VEE])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_mu-entropy-lab"))
        .args(["norm2", "--polytope", UNIT, "--q", VEE])
        .env("MU_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn oracle_agrees_with_exact() {
    let v = json_ok(&["oracle", "--polytope", SQUARE, "--q", r#"{"pieces":[{"gradient":[-1,0],"constant":0},{"gradient":[1,1],"constant":-2}]}"#, "--tau", "1", "--samples", "20000", "--cells", "200"]);
    for k in ["i0", "i1"] {
        assert!(v["z_scores"][k].as_f64().unwrap().abs() < 5.0);
        let (e, g) = (v["exact"][k].as_f64().unwrap(), v["grid"][k].as_f64().unwrap());
        assert!((e - g).abs() < 1e-4 * e.abs());
    }
}

#[test]
fn futaki_and_dh_run() {
    let v = json_ok(&["futaki", "--polytope", UNIT, "--q", VEE, "--xi", "0", "--lambda", "-1"]);
    assert!(v["futaki"].as_f64().unwrap().is_finite());
    let d = json_ok(&["dh", "--polytope", UNIT, "--q", VEE]);
    assert!((d["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn wkappa_and_optimize_run() {
    let v = json_ok(&["wkappa", "--a", "1", "--kappa", "0.001", "--f", "0,0.5"]);
    let (wk, we) = (v["w_kappa"].as_f64().unwrap(), v["w_ext"].as_f64().unwrap());
    assert!((wk - we).abs() < 1e-2 * (1.0 + we.abs()));
    let o = json_ok(&["optimize", "--polytope", UNIT, "--lambda", "-1", "--pieces", "2", "--restarts", "2", "--seed", "1"]);
    assert!(o["value"].as_f64().unwrap() >= -4.0 * PI - 1.0 - 1e-9);
}
