use std::process::{Command, Output};

use serde_json::Value;

fn lmg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmg")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const N7: [&str; 6] = ["--n", "7", "--v", "0.75", "--w", "0.5"];

fn with_n7<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(N7);
    v.extend(extra);
    v
}

#[test]
fn spectrum_lists_all_states() {
    let out = lmg(&with_n7("spectrum", &[]));
    assert!(out.status.success());
    let v = json(&out);
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 8);
    let ground = states[0]["omega_exact"].as_f64().unwrap();
    assert!((ground + 3.34051529181).abs() < 1e-9);
    for s in states {
        let d = s["omega_exact"].as_f64().unwrap() - s["omega_bethe"].as_f64().unwrap();
        assert!(d.abs() < 1e-8);
    }
}

#[test]
fn spectrum_csv_has_header_and_rows() {
    let out = lmg(&with_n7("spectrum", &["--format", "csv"]));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,sector,sector_index,omega_exact,omega_bethe");
    assert_eq!(lines.count(), 8);
}

#[test]
fn ground_angles_in_both_depths() {
    let out = lmg(&with_n7("angles", &["--index", "1", "--depth", "linear"]));
    let th: Vec<f64> = json(&out)["thetas"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in th.iter().zip([3.13478, 3.20338, 9.78939]) {
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
    let out = lmg(&with_n7("angles", &["--depth", "log", "--format", "csv"]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("step,theta\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bethe_sector_pairons() {
    let out = lmg(&with_n7("bethe", &["--sector", "1,0"]));
    let v = json(&out);
    let e: Vec<f64> = v["solutions"][0]["energies"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in e.iter().zip([0.701066, 1.33363, 1.94591]) {
        assert!((a - b).abs() < 1e-5);
    }
    assert_eq!(v["solutions"].as_array().unwrap().len(), 4);
}

#[test]
fn state_amplitudes_are_normalized() {
    let out = lmg(&with_n7("state", &["--index", "3"]));
    let v = json(&out);
    let n: f64 = v["amplitudes"].as_array().unwrap().iter().map(|a| a["amplitude"].as_f64().unwrap().powi(2)).sum();
    assert!((n - 1.0).abs() < 1e-12);
    assert_eq!(v["sector_index"], 2);
}

#[test]
fn circuit_file_round_trip_through_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ground.json");
    let p = path.to_str().unwrap();
    assert!(lmg(&with_n7("circuit", &["--depth", "log", "--out", p])).status.success());
    let out = lmg(&["simulate", "--circuit", p, "--report-energy", "--n", "7", "--v", "0.75", "--w", "0.5", "--sector", "1,0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let e = v["energy"]["exact"].as_f64().unwrap();
    assert!(((e + 3.34051529181) / 3.34051529181).abs() < 1e-9);
    assert!(v["leakage"].as_f64().unwrap() < 1e-12);
}

#[test]
fn qasm_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ground.qasm");
    let p = path.to_str().unwrap();
    assert!(lmg(&with_n7("circuit", &["--format", "qasm", "--out", p])).status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("OPENQASM 3;"));
    assert_eq!(text.matches("ctrl @ ry(").count(), 3);
    assert_eq!(text.matches("cx ").count(), 3);
    let out = lmg(&["simulate", "--circuit", p]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vqe_output_is_reproducible() {
    let args = with_n7("vqe", &["--seed", "5", "--restarts", "3", "--shots", "10000", "--max-evals", "300"]);
    let a = lmg(&args);
    let b = lmg(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let exact = lmg(&with_n7("vqe", &["--seed", "5", "--restarts", "4"]));
    assert!(json(&exact)["result"]["abs_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = with_n7("spectrum", &[]);
    let a = lmg(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_lmg")).args(&args).env("LMG_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_lmg")).args(&args).env("LMG_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_arguments_exit_2() {
    assert_eq!(lmg(&["spectrum", "--n", "7"]).status.code(), Some(2));
    assert_eq!(lmg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lmg(&with_n7("bethe", &["--sector", "2,0"])).status.code(), Some(2));
    let out = lmg(&with_n7("state", &["--index", "9"]));
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid-argument");
}

#[test]
fn computation_failure_exits_1_with_json() {
    let out = lmg(&["bethe", "--n", "5", "--v", "0.2", "--w", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "unsupported-regime");
}

#[test]
fn benchmark_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = lmg(&["benchmark", "--n", "1", "--v", "0.75", "--w", "0.5", "--restarts", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let sectors = v["sectors"].as_array().unwrap();
    assert_eq!(sectors.len(), 2);
    for s in sectors {
        let row = &s["rows"][0];
        assert_eq!(row["fidelity_linear"].as_f64().unwrap(), 1.0);
        assert_eq!(row["energy_error_log"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn verify_reports_only_the_known_fixture_mismatches() {
    let out = lmg(&["verify"]);
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["passed"].as_bool().unwrap())
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["n20_ground_state", "small_n_closed_forms"]);
    assert_eq!(out.status.code(), Some(1));
}
