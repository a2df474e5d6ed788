use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relgodunov"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_error_line(o: &Output, code: i32, kind: &str) {
    assert_eq!(o.status.code(), Some(code), "{}{}", stdout(o), stderr(o));
    let e = stderr(o);
    assert_eq!(e.lines().count(), 1, "{e}");
    assert!(e.starts_with(&format!("error kind={kind} reason=")), "{e}");
}

#[test]
fn verify_default_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("checks passed: PASS"));
    assert!(!s.contains("FAIL"));
    for name in ["causality", "symmetrizer", "Legendre", "index ODE", "double-gamma", "nu(p(n)) = n"] {
        assert!(s.contains(name), "missing {name}");
    }
}

#[test]
fn acausal_gamma_fails_verification() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "g3.cfg", "family = gamma-law\ngamma = 3\n");
    let o = run(&["verify", "--config", &c]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL causality"), "{}", stdout(&o));
}

#[test]
fn ideal_gas_runs_five_field_suite() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "ig.cfg", "family = ideal-gas\nm = 1\ngamma = 1.6666666666666667\n");
    let out = d.path().join("out");
    let o = run(&["verify", "--config", &c, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("5-field symmetrizer"));
    assert!(s.contains("X_hat(theta, psi_4) = p"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().len() > 5);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn index_table_rejects_nonpositive_p_min() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "bad.cfg", "p_min = 0\n");
    let o = run(&["index-table", "--config", &c]);
    assert_error_line(&o, 2, "config");
    assert!(stderr(&o).contains("p_min"));
}

#[test]
fn index_table_writes_seventeen_digit_csv() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("t");
    let o = run(&["index-table", "--points", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("index_table.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,f,nu,xhat,ode_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0], 1e-3);
    assert!((rows[10][0] - 1e3).abs() < 1e-9);
    for r in &rows {
        // massless gamma = 4/3: rho = 3p, so nu = 4p/f
        assert!((r[2] - 4.0 * r[0] / r[1]).abs() / r[2] < 1e-12);
        assert!(r[4] < 1e-8);
    }
    let first = csv.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(first, "1.0000000000000000e-3");
}

#[test]
fn stiff_shock_is_flagged_linearly_degenerate() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "s.cfg", "family = stiff\np_minus = 1\np_plus = 3\n");
    let o = run(&["shock", "--config", &c, "--sweep", "1e-3:1e-1:5"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("linearly degenerate"));
    assert!(s.contains("weak-shock exponent: undefined"));
}

#[test]
fn shock_sweep_reports_cubic_slope() {
    let o = run(&["shock", "--sweep", "1e-3:1e-1:9"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.starts_with("weak-shock exponent: ")).unwrap();
    let k: f64 = line.trim_start_matches("weak-shock exponent: ").parse().unwrap();
    assert!((2.8..=3.2).contains(&k), "{k}");
    // 1 main row + 9 sweep rows + header
    assert_eq!(s.lines().filter(|l| l.ends_with(",regular")).count(), 10);
}

#[test]
fn shock_sweep_needs_two_decades() {
    let o = run(&["shock", "--sweep", "1e-3:1e-2:4"]);
    assert_error_line(&o, 2, "precondition");
}

#[test]
fn ideal_gas_shock_produces_entropy() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "ig.cfg", "family = ideal-gas\nv_minus = 0.8\n");
    let o = run(&["shock", "--config", &c]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("entropy production"));
    let c = config(d.path(), "sub.cfg", "family = ideal-gas\nv_minus = 0.1\n");
    let o = run(&["shock", "--config", &c]);
    assert_error_line(&o, 1, "subsonic-upstream");
}

#[test]
fn simulate_writes_outputs_and_deterministic_manifest() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "sim.cfg", "preset = rh-shock\nn = 128\n");
    let mut manifests = Vec::new();
    for k in 0..2 {
        let out = d.path().join(format!("o{k}"));
        let o = run(&["simulate", "--config", &c, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("N_nu: producing"), "{}", stdout(&o));
        for f in ["snapshots.csv", "diagnostics.csv", "summary.json", "manifest.json"] {
            assert!(out.join(f).exists(), "{f}");
        }
        manifests.push(std::fs::read_to_string(out.join("manifest.json")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
    assert!(manifests[0].contains("\"preset\": \"rh-shock\""));
}

#[test]
fn simulate_stiff_is_degenerate() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "sim.cfg", "preset = stiff-shock\nn = 100\n");
    let o = run(&["simulate", "--config", &c]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("N_nu: degenerate"), "{}", stdout(&o));
}

#[test]
fn usage_errors() {
    assert_error_line(&run(&[]), 2, "usage");
    assert_error_line(&run(&["verify", "--seed", "x"]), 2, "usage");
    assert_error_line(&run(&["verify", "--config", "/nonexistent/x.cfg"]), 2, "io");
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "typo.cfg", "gama = 2\n");
    let o = run(&["verify", "--config", &c]);
    assert_error_line(&o, 2, "config");
    assert!(stderr(&o).contains("gama"));
    let c = config(d.path(), "cfl.cfg", "cfl = 2\n");
    assert_error_line(&run(&["simulate", "--config", &c]), 2, "config");
    assert_error_line(&run(&["simulate", "--points", "0"]), 2, "config");
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
