use irs_covert_experiment::config::{Method, ScenarioConfig};
use irs_covert_experiment::sweep::{cdf_path, manifest_path, CDF_COLUMNS, CSV_COLUMNS};
use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], cfg: Option<&Path>, out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_irs-covert"));
    cmd.args(args);
    if let Some(c) = cfg {
        cmd.arg("--config").arg(c);
    }
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, config: &ScenarioConfig) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

/// Trial rows as column-name → value maps.
fn trial_rows(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .filter(|l| l.starts_with("trial,"))
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

#[test]
fn validate_passes() {
    let out = cli(&["validate"], None, None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn perfect_sweep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = ScenarioConfig {
        trials: 3,
        p_total_dbm: vec![-20.0, 0.0],
        ..Default::default()
    };
    let cfg = write_config(dir.path(), &config);
    let csv_path = dir.path().join("nested/perfect.csv");
    let out = cli(&["perfect", "--seed", "5", "--trials", "2"], Some(&cfg), Some(&csv_path));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let rows = trial_rows(&csv);
    assert_eq!(rows.len(), 2 * 2);
    assert!(rows.iter().all(|r| r["method"] == "perfect" && r["error"].is_empty()));
    // zero leakage is the equal-power limit of the detector
    for r in &rows {
        let p_fa: f64 = r["p_fa"].parse().unwrap();
        let p_md: f64 = r["p_md"].parse().unwrap();
        assert!((p_fa - (-1.0f64).exp()).abs() < 1e-6);
        assert!((p_md - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
    }
    assert_eq!(csv.lines().filter(|l| l.starts_with("mean,")).count(), 2);
    assert_eq!(csv.lines().filter(|l| l.starts_with("std,")).count(), 2);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(manifest_path(&csv_path)).unwrap()).unwrap();
    assert_eq!(manifest["command"], "perfect");
    assert_eq!(manifest["config"]["master_seed"], 5);
    assert_eq!(manifest["config"]["trials"], 2);
    assert!(manifest["git_describe"].as_str().is_some_and(|s| !s.is_empty()));
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(!cdf_path(&csv_path).exists());
}

#[test]
fn detection_report_tracks_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let config = ScenarioConfig {
        trials: 2,
        p_total_dbm: vec![5.0],
        epsilon: vec![0.05, 0.1, 0.15, 0.2],
        methods: vec![Method::RobustKl01],
        ..Default::default()
    };
    let cfg = write_config(dir.path(), &config);
    let csv_path = dir.path().join("detect.csv");
    let out = cli(&["detect"], Some(&cfg), Some(&csv_path));
    assert!(out.status.success());
    let rows = trial_rows(&std::fs::read_to_string(&csv_path).unwrap());
    assert_eq!(rows.len(), 8);
    for trial in ["0", "1"] {
        let mut last = (f64::INFINITY, f64::INFINITY);
        for r in rows.iter().filter(|r| r["trial"] == trial) {
            let eps: f64 = r["epsilon"].parse().unwrap();
            let p_fa: f64 = r["p_fa"].parse().unwrap();
            let p_md: f64 = r["p_md"].parse().unwrap();
            assert!(p_fa + p_md >= 1.0 - eps);
            assert_eq!(r["fa_below_md"], "true");
            assert!(p_fa < last.0 && p_md < last.1);
            assert!(r["max_sampled_kl"].is_empty());
            last = (p_fa, p_md);
        }
    }
}

#[test]
fn robust_run_writes_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let config = ScenarioConfig {
        trials: 1,
        p_total_dbm: vec![5.0],
        kl_samples: 100,
        ..Default::default()
    };
    let cfg = write_config(dir.path(), &config);
    let csv_path = dir.path().join("robust.csv");
    let out = cli(&["robust"], Some(&cfg), Some(&csv_path));
    assert!(out.status.success());
    let rows = trial_rows(&std::fs::read_to_string(&csv_path).unwrap());
    let methods: Vec<&str> = rows.iter().map(|r| r["method"].as_str()).collect();
    assert_eq!(methods, ["robust_kl01", "robust_kl10"]);
    assert!(rows.iter().all(|r| r["violation_fraction"] == "0"));

    let cdf = std::fs::read_to_string(cdf_path(&csv_path)).unwrap();
    let mut lines = cdf.lines();
    assert_eq!(lines.next().unwrap(), CDF_COLUMNS.join(","));
    let first: Vec<(f64, f64)> = lines
        .filter(|l| l.starts_with("robust_kl01,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect();
    assert_eq!(first.len(), 100);
    assert!(first.windows(2).all(|p| p[0].0 <= p[1].0 && p[0].1 < p[1].1));
    assert_eq!(first.last().unwrap().1, 1.0);
    assert!(first.last().unwrap().0 <= 0.02);
}

#[test]
fn bad_inputs_exit_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"trials": 0}"#).unwrap();
    let out = cli(&["sweep"], Some(&cfg), Some(&dir.path().join("x.csv")));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));

    let out = cli(&["sweep"], Some(&dir.path().join("missing.json")), None);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&cfg, "{not json").unwrap();
    let out = cli(&["sweep"], Some(&cfg), None);
    assert_eq!(out.status.code(), Some(2));
}
