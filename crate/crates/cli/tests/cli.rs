//! End-to-end tests driving the compiled binary.

use std::process::{Command, Output};

fn sitnikov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sitnikov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn table1_single_row() {
    let out = sitnikov(&["table1", "--n-max", "1"]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let eta: f64 = rows[0][col(&header, "eta")].parse().unwrap();
    assert!((eta - 1.719172322161927).abs() < 1e-8);
    let dev_a: f64 = rows[0][col(&header, "dev_a_n")].parse().unwrap();
    assert!(dev_a > 5e-4, "reference deviation column must be reported");
    // Tolerances travel with every row.
    let abs_tol: f64 = rows[0][col(&header, "abs_tol")].parse().unwrap();
    assert_eq!(abs_tol, 1e-12);
}

#[test]
fn table1_rejects_zero() {
    let out = sitnikov(&["table1", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table1_is_bitwise_deterministic() {
    let a = sitnikov(&["table1", "--n-max", "2"]);
    let b = sitnikov(&["table1", "--n-max", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table1_respects_thread_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_sitnikov"))
        .args(["table1", "--n-max", "2"])
        .env("SITNIKOV_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let free = sitnikov(&["table1", "--n-max", "2"]);
    assert_eq!(out.stdout, free.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_sitnikov"))
        .args(["table1", "--n-max", "1"])
        .env("SITNIKOV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn slope_reports_verdicts() {
    let out = sitnikov(&["slope", "--m", "2", "--p", "1", "--parity", "odd"]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows[0][col(&header, "verdict")], "hyperbolic");

    let out = sitnikov(&["slope", "--m", "2", "--p", "1", "--parity", "even"]);
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows[0][col(&header, "verdict")], "elliptic");

    let out = sitnikov(&["slope", "--m", "3", "--p", "1", "--parity", "odd"]);
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows[0][col(&header, "verdict")], "undetermined");
    assert_eq!(rows[0][col(&header, "a_n")], "");
}

#[test]
fn slope_json_is_well_formed() {
    let out = sitnikov(&[
        "slope", "--m", "2", "--p", "1", "--parity", "odd", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &v.as_array().unwrap()[0];
    assert_eq!(row["verdict"], "hyperbolic");
    assert!(row["tau_prime"].as_f64().unwrap() > 0.0);
    assert!(row["a_n"].as_f64().is_some());
}

#[test]
fn slope_rejects_inadmissible_frequency() {
    let out = sitnikov(&["slope", "--m", "1", "--p", "3", "--parity", "odd"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn continue_sweep_and_validation() {
    let out = sitnikov(&[
        "continue", "--m", "2", "--p", "1", "--parity", "even", "--e", "0,0.01",
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 2);
    let tau: f64 = rows[1][col(&header, "tau")].parse().unwrap();
    assert!(tau < 2.0 && tau.abs() < 2.0);
    assert_eq!(rows[1][col(&header, "class")], "elliptic");

    // Must start at 0, ascend, be non-empty.
    assert_eq!(
        sitnikov(&["continue", "--m", "2", "--p", "1", "--parity", "odd", "--e", "0.01"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sitnikov(&[
            "continue",
            "--m",
            "2",
            "--p",
            "1",
            "--parity",
            "odd",
            "--e",
            "0,0.02,0.01"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn continue_tau_increases_for_odd_family() {
    let out = sitnikov(&[
        "continue",
        "--m",
        "2",
        "--p",
        "1",
        "--parity",
        "odd",
        "--e",
        "0,0.01,0.02",
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    let taus: Vec<f64> = rows
        .iter()
        .map(|r| r[col(&header, "tau")].parse().unwrap())
        .collect();
    assert!(taus[1] > taus[0] && taus[2] > taus[1]);
    assert_eq!(rows[2][col(&header, "class")], "hyperbolic");
}

#[test]
fn period_by_energy_and_by_target() {
    let out = sitnikov(&["period", "--h", "-0.5222232633561835"]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    let t: f64 = rows[0][col(&header, "period")].parse().unwrap();
    assert!((t - 4.0 * std::f64::consts::PI).abs() < 1e-8);

    let out = sitnikov(&["period", "--t-target", "12.566370614359172"]);
    let (header, rows) = parse_csv(&stdout(&out));
    let h: f64 = rows[0][col(&header, "h")].parse().unwrap();
    assert!((h + 0.5222232633561835).abs() < 1e-9);
    let tp: f64 = rows[0][col(&header, "period_derivative")].parse().unwrap();
    assert!(tp > 0.0);
}

#[test]
fn period_argument_validation() {
    assert_eq!(sitnikov(&["period"]).status.code(), Some(2));
    assert_eq!(
        sitnikov(&["period", "--h", "-0.5", "--t-target", "13.0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sitnikov(&["period", "--h", "0.5"]).status.code(), Some(2));
    assert_eq!(
        sitnikov(&["period", "--t-target", "2.0"]).status.code(),
        Some(2)
    );
}

#[test]
fn out_writes_file() {
    let dir = std::env::temp_dir().join(format!("sitnikov-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rows.csv");
    let out = sitnikov(&["period", "--h", "-0.9", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("h,eta,xi,period"));
    std::fs::remove_dir_all(&dir).ok();
}
