use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const MU_SE: f64 = 3.040423398444176e-6;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lindstedt")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn reference_roots_from_solve() {
    let v = json(&["bifurcate", "solve", "--system", "sun-earth", "--case", "x2z", "--a1", "0.15", "--a3sq", "-2.5e-5"]);
    let pos: Vec<f64> = v["positive"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(pos.len(), 2);
    for (got, want) in pos.iter().zip([0.7085, 9.4484]) {
        assert!((got - want).abs() / want < 0.01, "{got} vs {want}");
    }
    assert_eq!(v["count"], 4);
    assert_eq!(v["case"], "x2z");
}

#[test]
fn params_echo_uses_preset_eccentricity() {
    let v = json(&["params", "--mu", "3.040423398444176e-6", "--point", "L1"]);
    assert_eq!(v["mu"].as_f64().unwrap(), MU_SE);
    assert_eq!(v["e"].as_f64().unwrap(), 0.01671022);
    assert_eq!(v["point"], "L1");
    assert!((v["gamma"].as_f64().unwrap() - 0.0100110).abs() < 1e-6);
    assert!((v["c"][0].as_f64().unwrap() - 4.0611).abs() < 1e-4);
    assert!((v["linear"]["omega0"].as_f64().unwrap() - 2.08645).abs() < 1e-5);
    assert_eq!(v["coupling"].as_array().unwrap().len(), 3);
}

#[test]
fn earth_moon_preset() {
    let v = json(&["params", "--system", "earth-moon", "--point", "l2"]);
    assert_eq!(v["mu"].as_f64().unwrap(), 0.0121505856);
    assert_eq!(v["e"].as_f64().unwrap(), 0.0549);
    assert_eq!(v["point"], "L2");
}

#[test]
fn zero_amplitude_orbit_sits_on_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let out = run(&["orbit", "--case", "x2z", "--a1", "0", "--a2", "0", "--a3", "0", "--samples", "8", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, "f,x,y,z,vx,vy,vz,X,Y,Z,VX,VY,VZ");
    assert_eq!(rows.len(), 9);
    let gamma = json(&["params"])["gamma"].as_f64().unwrap();
    for r in &rows {
        assert!(r[1..7].iter().all(|v| *v == 0.0));
        assert!((r[7] - (MU_SE - 1.0 + gamma)).abs() < 1e-9);
        assert!(r[8..].iter().all(|v| *v == 0.0));
    }
}

#[test]
fn halo_orbit_from_branch_root() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("halo.csv");
    let out = run(&["orbit", "--a1", "0.15", "--branch", "small", "--order", "3", "--samples", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("halo orbit"), "{err}");
    let (_, rows) = read_csv(&path);
    // the coupled orbit leaves the plane
    assert!(rows.iter().any(|r| r[3].abs() > 1e-3));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["params", "--no-such-flag"]), 2);
    assert_eq!(code(&["bifurcate", "solve", "--a3", "0.1", "--a3sq", "0.01"]), 2);
    assert_eq!(code(&["params", "--mu", "0.7"]), 3);
    assert_eq!(code(&["params", "--e", "1.5"]), 3);
    assert_eq!(code(&["build", "--order", "0"]), 3);
    // an arbitrary eta does not satisfy Delta = 0
    assert_eq!(code(&["orbit", "--a1", "0.05", "--eta", "0.5", "--order", "3"]), 3);
    assert_eq!(code(&["bifurcate", "region", "--a1", "0.1"]), 0);
    assert_eq!(code(&["surface", "--case", "z2y", "--surface", "a", "--grid", "3"]), 3);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"case": "z2y", "mu": 0.01, "e": 0.0, "a1": 0.2, "a2": 0.1}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&["bifurcate", "solve", "--config", c]);
    assert_eq!(v["case"], "z2y");
    assert_eq!(v["form"]["mu"].as_f64().unwrap(), 0.01);
    assert_eq!(v["point"]["alpha1"].as_f64().unwrap(), 0.2);
    let v = json(&["bifurcate", "solve", "--config", c, "--case", "y2z", "--a1", "0.3"]);
    assert_eq!(v["case"], "y2z");
    assert_eq!(v["point"]["alpha1"].as_f64().unwrap(), 0.3);
    assert_eq!(v["point"]["alpha2"].as_f64().unwrap(), 0.1);

    std::fs::write(&cfg, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(code(&["params", "--config", c]), 2);
    assert_eq!(code(&["params", "--config", dir.path().join("missing.json").to_str().unwrap()]), 2);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert_eq!(code(&["build", "--case", "y2z", "--order", "4", "--out", p.to_str().unwrap()]), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["completed_order"], 4);
    assert_eq!(v["eta_degree"], 6);
    assert!(v["coefficients"].as_array().unwrap().len() > 100);
}

#[test]
fn numeric_build_at_zero_eta_flags_free_corrections() {
    let out = run(&["build", "--order", "3", "--eta", "0"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta_undetermined"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta = 0"));
}

#[test]
fn thresholds() {
    let v = json(&["bifurcate", "threshold", "--case", "x2z", "--e", "0"]);
    assert!((v["alpha1_crit"].as_f64().unwrap() - 0.1455).abs() < 1e-3);
    let v = json(&["bifurcate", "threshold", "--case", "z2y"]);
    assert!((v["alpha2_max"].as_f64().unwrap() - 1.576).abs() < 1e-3);
    assert!((v["alpha1_cri"].as_f64().unwrap() - 0.742).abs() < 1e-3);
}

#[test]
fn surface_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let args = ["surface", "--surface", "c", "--sheet", "transit", "--grid", "21", "--out", path.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "alpha1,alpha2,alpha3,surface_id,branch");
    let rows: Vec<_> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.ends_with(",c=0,transit")));
}

#[test]
fn validation_report() {
    let v = json(&["validate", "--a1", "0.01", "--a2", "0.01", "--order", "5", "--samples", "20"]);
    assert_eq!(v["class"], "lissajous");
    let r = &v["report"];
    assert!(r["residual_max"].as_f64().unwrap() < 1e-7);
    assert!(r["deviation_max"].as_f64().unwrap() < 1e-2);
    let defects = r["symmetry_defects"].as_array().unwrap();
    assert_eq!(defects.len(), 3);
}
