use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn wfpo(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wfpo"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("WFPO_OUT")
        .output()
        .unwrap()
}

fn error_json(o: &Output) -> serde_json::Value {
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    let line = err.lines().rev().find(|l| l.starts_with('{')).expect("error record");
    serde_json::from_str(line).unwrap()
}

fn last_row(csv: &Path) -> Vec<f64> {
    let text = fs::read_to_string(csv).unwrap();
    text.lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect()
}

#[test]
fn chirp_pair_level_two_asymmetry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("table1.cfg");
    let cfg = cfg.to_str().unwrap();
    for chirp in ["+80", "-80"] {
        let o = wfpo(&["simulate", cfg, "--chirp", chirp], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let pos = last_row(&dir.path().join("simulate_rotating_chirp+80.csv"));
    let neg = last_row(&dir.path().join("simulate_rotating_chirp-80.csv"));
    // columns t, p1, p2, p3, p4, re, im
    let ratio = neg[2] / pos[2];
    assert!((30.0..300.0).contains(&ratio), "ratio {ratio}");
    let header = fs::read_to_string(dir.path().join("simulate_rotating_chirp-80.csv")).unwrap();
    assert!(header.lines().any(|l| l == "# chirp = -80.0"));
    assert!(header
        .lines()
        .any(|l| l == "t,p1,p2,p3,p4,re_rho_c_trace,im_rho_c_trace"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("table1.cfg");
    let args = ["pulse-acf", cfg.to_str().unwrap(), "--chirp", "4"];
    assert!(wfpo(&args, dir.path()).status.success());
    let first = fs::read(dir.path().join("pulse_acf_chirp+4.csv")).unwrap();
    let summary = fs::read(dir.path().join("pulse_acf_chirp+4.json")).unwrap();
    assert!(wfpo(&args, dir.path()).status.success());
    assert_eq!(first, fs::read(dir.path().join("pulse_acf_chirp+4.csv")).unwrap());
    assert_eq!(summary, fs::read(dir.path().join("pulse_acf_chirp+4.json")).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&summary).unwrap();
    assert_eq!(doc["config"]["pulse"]["chirp"], 4.0);
    assert!(doc["result"]["acf_hermitian_defect"].as_f64().unwrap() < 1e-12);
}

#[test]
fn seedless_runs_refuse_random_masks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("table1.cfg");
    let cfg = cfg.to_str().unwrap();
    let o = wfpo(&["verify-phase", cfg, "--masks", "2", "--seedless", "--chirp", "3"], dir.path());
    assert_eq!(error_json(&o)["error"], "seedless_violation");
    let o = wfpo(
        &["verify-phase", cfg, "--masks", "0", "--seedless", "--chirp", "3", "--set", "experiment.bins=[1000]"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn configuration_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");

    fs::write(&bad, "[pulse]\n[grids]\n").unwrap();
    let e = error_json(&wfpo(&["simulate", bad.to_str().unwrap()], dir.path()));
    assert_eq!(e["error"], "config_validation");
    assert!(e["message"].as_str().unwrap().contains("`model`"));

    fs::write(&bad, "[model]\ngamma = -1\n[pulse]\n[grids]\n").unwrap();
    let e = error_json(&wfpo(&["simulate", bad.to_str().unwrap()], dir.path()));
    assert!(e["message"].as_str().unwrap().contains("model.gamma"));

    fs::write(&bad, "[model]\n[pulse]\nchrip = 3\n[grids]\n").unwrap();
    let e = error_json(&wfpo(&["simulate", bad.to_str().unwrap()], dir.path()));
    assert_eq!(e["error"], "config_parse");
    assert!(e["message"].as_str().unwrap().contains("line 3"));

    let e = error_json(&wfpo(&["simulate", "/nonexistent.cfg"], dir.path()));
    assert_eq!(e["error"], "io");
}

#[test]
fn output_directory_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "[model]\n[pulse]\nchirp = 2\n[grids]\n").unwrap();
    let target = dir.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_wfpo"))
        .args(["pulse-acf", "--config", cfg.to_str().unwrap()])
        .env("WFPO_OUT", &target)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(target.join("pulse_acf_chirp+2.json").exists());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["subcommand"], "pulse-acf");
}

#[test]
fn short_sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("table1.cfg");
    let o = wfpo(
        &[
            "sweep-mu",
            cfg.to_str().unwrap(),
            "--chirp",
            "3",
            "--jobs",
            "2",
            "--set",
            "experiment.mu_values=[1e-4, 1e-3]",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep_mu_excited_surface.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "value,dn_pos,dn_neg,effect");
    assert_eq!(rows.len(), 3);
    let records = fs::read_to_string(dir.path().join("sweep_mu_records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 4);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let slope = report["summary"]["slope_pt_pos"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.01);
}
