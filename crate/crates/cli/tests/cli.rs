use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qsplab::experiments::read_csv;
use qsplab::qsp::read_phase_file;

fn qsplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsplab")).args(args).output().unwrap()
}

fn write_config(dir: &Path, eps_target: &str) -> String {
    let path = dir.join("sweep.toml");
    let text = format!(
        "method = \"both\"\nN = 3\ntau_grid = [\"0.5:0.5:1\"]\np_levels = [1e-3]\neps_target = {eps_target}\n\
         schedules = [[1, 2, 3]]\nshots = 1000\nseed = 1\noutput_path = \"{}\"\n",
        dir.join("default.csv").display()
    );
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn sweep_with_overrides_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "1e-3");
    let out_a = dir.path().join("a.csv").display().to_string();
    let out_b = dir.path().join("b.csv").display().to_string();
    let a = qsplab(&["sweep", &config, "--seed", "7", "--shots", "5000", "--out", &out_a]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = qsplab(&["--sequential", "sweep", &config, "--seed", "7", "--shots", "5000", "--out", &out_b]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
    let rows = read_csv(Path::new(&out_a)).unwrap();
    assert!(rows.iter().all(|r| r.shots == 5000));
    assert!(rows.iter().any(|r| r.method == "trotter") && rows.iter().any(|r| r.method == "qsp"));
    assert!(!dir.path().join("default.csv").exists());

    let c = qsplab(&["sweep", &config]);
    assert_eq!(c.status.code(), Some(0));
    assert!(dir.path().join("default.csv").exists());
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "method = \"qsp\"\n").unwrap();
    assert_eq!(qsplab(&["sweep", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(qsplab(&["sweep", "does/not/exist.toml"]).status.code(), Some(1));
}

#[test]
fn cell_failures_exit_with_two_and_still_write_rows() {
    let dir = tempfile::tempdir().unwrap();
    // eps_coeff = eps_target / 10 falls below what the truncation search accepts
    let config = write_config(dir.path(), "5e-8");
    let out = qsplab(&["sweep", &config]);
    assert_eq!(out.status.code(), Some(2));
    let rows = read_csv(&dir.path().join("default.csv")).unwrap();
    assert!(rows.iter().filter(|r| r.method == "qsp").all(|r| r.is_failure()));
    assert!(rows.iter().filter(|r| r.method == "trotter").all(|r| !r.is_failure() || r.fit.contains("exponential")));
}

#[test]
fn tables_and_phases() {
    let degrees = qsplab(&["degrees", "--taus", "0.1,20", "--eps", "1e-5"]);
    let text = String::from_utf8(degrees.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,eps_coeff,r,degree,linf_error");
    assert_eq!(lines[2].split(',').nth(3), Some("31"));

    let budgets = qsplab(&["budgets", "--taus", "0.1", "--p", "1e-3"]);
    let text = String::from_utf8(budgets.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);

    let steady = qsplab(&["steady-state", "--taus", "5", "--sites", "3", "--p", "0.05"]);
    assert!(steady.status.success());
    assert_eq!(String::from_utf8(steady.stdout).unwrap().lines().count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phases.txt");
    let out = qsplab(&["phases", "3", "1e-5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let (header, phases) = read_phase_file(&path).unwrap();
    assert_eq!(header.n, phases.degree());
    assert_eq!(header.tau, 3.0);
}
