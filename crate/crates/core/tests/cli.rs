use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causal-qram"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn naive_bound_json() {
    let out = run(&["bound", "--preset", "naive", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let n = v["max_qubits_total"].as_f64().unwrap();
    assert!((n / 8.9e12 - 1.0).abs() < 0.02, "{n}");
}

#[test]
fn bound_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hw.conf");
    fs::write(&path, "a = 1e-6\ndelta_t = 1e-3\ng1 = 6283.185307179586\ng2 = 6283.185307179586\nlambda = 1\nm = 1\nd = 2\nnu = 1\n").unwrap();
    let out = run(&[
        "bound",
        "--config",
        path.to_str().unwrap(),
        "--kind",
        "teleport-hybrid",
        "--depth-exponent",
        "0",
        "--json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let n = v["max_qubits_total"].as_f64().unwrap();
    assert!((n / 9e22 - 1.0).abs() < 1e-9, "{n}");
}

#[test]
fn config_errors_exit_2() {
    let out = run(&["bound", "--config", "/nonexistent/hw.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config not found"));
    let out = run(&["bound", "--kind", "teleport-hybrid", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["lightcone", "--l", "4", "--lambda", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let out = run(&["sweep", "--preset", "fig3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let meta: serde_json::Value =
        serde_json::from_str(lines.next().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(meta["conventions"]["depth_exponent"], 2);
    assert_eq!(
        lines.next().unwrap(),
        "velocity,max_qubits_d1,max_qubits_d2,max_qubits_d3"
    );
    assert_eq!(lines.count(), 50);
}

#[test]
fn lightcone_reports_pass_and_writes_arrivals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cone.csv");
    let out = run(&["lightcone", "--l", "200", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS"), "{text}");
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("r,t_arrival,commutator_peak"));
    assert_eq!(lines.count(), 99);
}

#[test]
fn qramsim_retrieves_database() {
    let out = run(&["qramsim", "--bits", "0110"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("2,1,1,"), "{text}");
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", "--inject-fault", "dispersion"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL lattice.dispersion"));
    assert_eq!(text.matches("FAIL").count(), 1);
}
