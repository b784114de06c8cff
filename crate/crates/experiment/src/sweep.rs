//! Seeded Monte Carlo sweeps and their CSV output.
//!
//! Every method has its own grid (`n_tx × p_total_dbm`, extended by
//! `epsilon × v_w` for the imperfect-knowledge methods). Channel seeds depend
//! only on the master seed, the antenna-count index and the trial, so all
//! methods and all power/ε/v_w points of a trial see the same channels.

use crate::config::{Method, ScenarioConfig};
use irs_covert::channel::sample_channels;
use irs_covert::design::{BeamformerSolution, DesignError};
use irs_covert::detection::DetectionReport;
use irs_covert::discrete::{discrete_design, PhaseCodebook};
use irs_covert::perfect::{alternate_optimize, no_irs_baseline};
use irs_covert::robust::{nominal_report, robust_alternate, worst_case_kl, EllipsoidModel, RobustParams};
use irs_covert::seeding::derive_seed;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

/// Trials may fail up to this fraction before the run is reported as failed.
pub const MAX_FAILURE_FRACTION: f64 = 0.05;

pub const CSV_COLUMNS: [&str; 26] = [
    "row_type",
    "method",
    "grid_index",
    "trial",
    "seed",
    "n",
    "m",
    "l_bits",
    "p_total_dbm",
    "epsilon",
    "v_w",
    "kl_case",
    "rate_bits",
    "iterations",
    "lambda0",
    "lambda1",
    "threshold",
    "p_fa",
    "p_md",
    "kl_01",
    "kl_10",
    "xi",
    "fa_below_md",
    "max_sampled_kl",
    "violation_fraction",
    "error",
];

type Column = Box<dyn Fn(&Outcome) -> Option<f64>>;

pub const CDF_COLUMNS: [&str; 5] = ["method", "grid_index", "trial", "kl_value", "cdf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub method: Method,
    pub grid_index: usize,
    pub trial: usize,
    pub n: usize,
    pub p_total_dbm: f64,
    pub epsilon: Option<f64>,
    pub v_w: Option<f64>,
    pub channel_seed: u64,
}

impl Job {
    pub fn design_seed(&self) -> u64 {
        derive_seed(self.channel_seed, &[1])
    }

    fn validation_seed(&self) -> u64 {
        derive_seed(self.channel_seed, &[2])
    }
}

/// All jobs in output order: method, then grid point, then trial.
pub fn plan(config: &ScenarioConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &method in &config.methods {
        let (eps, vw): (Vec<Option<f64>>, Vec<Option<f64>>) = if method.is_robust_family() {
            (
                config.epsilon.iter().map(|&e| Some(e)).collect(),
                config.v_w.iter().map(|&v| Some(v)).collect(),
            )
        } else {
            (vec![None], vec![None])
        };
        let mut grid_index = 0;
        for (ni, &n) in config.n_tx.iter().enumerate() {
            for &p in &config.p_total_dbm {
                for &e in &eps {
                    for &v in &vw {
                        for trial in 0..config.trials {
                            jobs.push(Job {
                                method,
                                grid_index,
                                trial,
                                n,
                                p_total_dbm: p,
                                epsilon: e,
                                v_w: v,
                                channel_seed: derive_seed(config.master_seed, &[ni as u64, trial as u64]),
                            });
                        }
                        grid_index += 1;
                    }
                }
            }
        }
    }
    jobs
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rate_bits: f64,
    pub iterations: usize,
    pub report: DetectionReport,
    pub max_sampled_kl: Option<f64>,
    pub violation_fraction: Option<f64>,
    /// Sorted sampled divergences of the robust-family methods.
    pub sampled_kl: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub job: Job,
    pub outcome: Result<Outcome, String>,
}

fn run_design(config: &ScenarioConfig, job: &Job) -> Result<Outcome, String> {
    let geom = config.geometry(job.n);
    let ch = sample_channels(&geom, &config.fading, job.channel_seed).map_err(|e| e.to_string())?;
    let params = config.params(job.p_total_dbm);
    let err = |e: DesignError| e.to_string();
    let plain = |sol: BeamformerSolution| -> Result<Outcome, String> {
        let report = nominal_report(&ch, &sol.w_b, &sol.q, params.sigma_w2).map_err(err)?;
        Ok(Outcome {
            rate_bits: sol.rate_bits,
            iterations: sol.iterations,
            report,
            max_sampled_kl: None,
            violation_fraction: None,
            sampled_kl: Vec::new(),
        })
    };
    match job.method {
        Method::Perfect => plain(alternate_optimize(&ch, &params, job.design_seed()).map_err(err)?),
        Method::Discrete => {
            let cb = PhaseCodebook::new(config.phase_bits).map_err(err)?;
            plain(discrete_design(&ch, &params, &cb, job.design_seed()).map_err(err)?)
        }
        Method::NoIrs => plain(no_irs_baseline(&ch, &params)),
        robust => {
            let case = robust.kl_case().expect("robust-family method");
            let (eps, v_w) = (job.epsilon.unwrap_or_default(), job.v_w.unwrap_or_default());
            let rp = RobustParams::new(params.clone(), eps, case).map_err(err)?;
            let actual = EllipsoidModel::balls(job.n, config.n_irs, v_w);
            let assumed = match robust {
                Method::NominalKl01 | Method::NominalKl10 => EllipsoidModel::balls(job.n, config.n_irs, 0.0),
                _ => actual.clone(),
            };
            let r = robust_alternate(&ch, &assumed, &rp, job.design_seed()).map_err(err)?;
            let mut outcome = Outcome {
                rate_bits: r.solution.rate_bits,
                iterations: r.solution.iterations,
                report: r.report,
                max_sampled_kl: None,
                violation_fraction: None,
                sampled_kl: Vec::new(),
            };
            if config.kl_samples > 0 {
                let wc = worst_case_kl(
                    &ch,
                    &r.solution.w_b,
                    &r.solution.q,
                    &actual,
                    case,
                    eps,
                    params.sigma_w2,
                    config.kl_samples,
                    job.validation_seed(),
                )
                .map_err(err)?;
                outcome.max_sampled_kl = Some(wc.max_kl);
                outcome.violation_fraction = Some(wc.violation_fraction);
                outcome.sampled_kl = wc.values;
            }
            Ok(outcome)
        }
    }
}

pub fn run_job(config: &ScenarioConfig, job: &Job) -> TrialRecord {
    let outcome = std::panic::catch_unwind(|| run_design(config, job)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        Err(format!("panic: {msg}"))
    });
    TrialRecord {
        job: job.clone(),
        outcome,
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
}

/// Runs every job on `jobs` worker threads; records keep the planned order.
pub fn run_sweep(config: &ScenarioConfig, jobs: usize) -> Result<SweepResult, rayon::ThreadPoolBuildError> {
    let planned = plan(config);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let records = pool.install(|| planned.par_iter().map(|job| run_job(config, job)).collect());
    Ok(SweepResult { records })
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn sanitize(msg: &str) -> String {
    msg.replace([',', '\n', '\r', '"'], " ")
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.outcome.is_err()).count()
    }

    pub fn failure_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.failures() as f64 / self.records.len() as f64
    }

    pub fn acceptable(&self) -> bool {
        self.failure_fraction() <= MAX_FAILURE_FRACTION
    }

    /// Trial rows in planned order followed by a mean and a std row per
    /// method and grid point (over successful trials).
    pub fn to_csv(&self, config: &ScenarioConfig) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        for r in &self.records {
            out.push_str(&trial_row(config, r));
            out.push('\n');
        }
        let mut start = 0;
        while start < self.records.len() {
            let key = (self.records[start].job.method, self.records[start].job.grid_index);
            let end = start
                + self.records[start..]
                    .iter()
                    .take_while(|r| (r.job.method, r.job.grid_index) == key)
                    .count();
            let group = &self.records[start..end];
            for row in summary_rows(config, group) {
                out.push_str(&row);
                out.push('\n');
            }
            start = end;
        }
        out
    }

    /// Empirical CDFs of the sampled divergences, one block per robust-family trial.
    pub fn cdf_csv(&self) -> String {
        let mut out = CDF_COLUMNS.join(",");
        out.push('\n');
        for r in &self.records {
            if let Ok(o) = &r.outcome {
                let n = o.sampled_kl.len() as f64;
                for (i, v) in o.sampled_kl.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        r.job.method.name(),
                        r.job.grid_index,
                        r.job.trial,
                        v,
                        (i + 1) as f64 / n
                    );
                }
            }
        }
        out
    }
}

fn job_columns(config: &ScenarioConfig, job: &Job) -> [String; 9] {
    let l_bits = (job.method == Method::Discrete).then_some(config.phase_bits);
    [
        job.method.name().to_string(),
        job.grid_index.to_string(),
        job.n.to_string(),
        config.n_irs.to_string(),
        opt(l_bits),
        job.p_total_dbm.to_string(),
        opt(job.epsilon),
        opt(job.v_w),
        job.method.kl_case().map(|c| c.name().to_string()).unwrap_or_default(),
    ]
}

fn trial_row(config: &ScenarioConfig, r: &TrialRecord) -> String {
    let [method, grid, n, m, l, p, eps, vw, case] = job_columns(config, &r.job);
    let head = format!(
        "trial,{method},{grid},{},{},{n},{m},{l},{p},{eps},{vw},{case}",
        r.job.trial, r.job.channel_seed
    );
    match &r.outcome {
        Ok(o) => {
            let d = &o.report;
            format!(
                "{head},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                o.rate_bits,
                o.iterations,
                d.lambda0,
                d.lambda1,
                d.threshold,
                d.p_fa,
                d.p_md,
                d.kl_01,
                d.kl_10,
                d.xi,
                d.p_fa <= d.p_md,
                opt(o.max_sampled_kl),
                opt(o.violation_fraction),
            )
        }
        Err(e) => format!("{head}{},{}", ",".repeat(CSV_COLUMNS.len() - 13), sanitize(e)),
    }
}

fn summary_rows(config: &ScenarioConfig, group: &[TrialRecord]) -> Vec<String> {
    let [method, grid, n, m, l, p, eps, vw, case] = job_columns(config, &group[0].job);
    let ok: Vec<&Outcome> = group.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let failed = group.len() - ok.len();
    let columns: Vec<Column> = vec![
        Box::new(|o| Some(o.rate_bits)),
        Box::new(|o| Some(o.iterations as f64)),
        Box::new(|o| Some(o.report.lambda0)),
        Box::new(|o| Some(o.report.lambda1)),
        Box::new(|o| Some(o.report.threshold)),
        Box::new(|o| Some(o.report.p_fa)),
        Box::new(|o| Some(o.report.p_md)),
        Box::new(|o| Some(o.report.kl_01)),
        Box::new(|o| Some(o.report.kl_10)),
        Box::new(|o| Some(o.report.xi)),
        Box::new(|o| Some(f64::from(u8::from(o.report.p_fa <= o.report.p_md)))),
        Box::new(|o| o.max_sampled_kl),
        Box::new(|o| o.violation_fraction),
    ];
    let stats: Vec<Option<(f64, f64)>> = columns
        .iter()
        .map(|f| {
            let values: Vec<f64> = ok.iter().filter_map(|o| f(o)).collect();
            (!values.is_empty()).then(|| mean_std(&values))
        })
        .collect();
    ["mean", "std"]
        .iter()
        .enumerate()
        .map(|(k, kind)| {
            let cells: Vec<String> = stats
                .iter()
                .map(|s| opt(s.map(|(mean, std)| if k == 0 { mean } else { std })))
                .collect();
            format!(
                "{kind},{method},{grid},,,{n},{m},{l},{p},{eps},{vw},{case},{},failed={failed}/{}",
                cells.join(","),
                group.len()
            )
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub config: &'a ScenarioConfig,
    pub jobs: usize,
    pub git_describe: String,
    pub wall_time_s: f64,
    pub rows: usize,
    pub failures: usize,
}

/// `git describe --always --dirty`, or `"unknown"` outside a repository.
pub fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn cdf_path(csv: &Path) -> PathBuf {
    csv.with_extension("cdf.csv")
}

/// Writes the CSV, its manifest and, when any trial sampled divergences, the CDF file.
pub fn write_outputs(
    csv: &Path,
    command: &str,
    config: &ScenarioConfig,
    jobs: usize,
    result: &SweepResult,
    wall: Duration,
) -> std::io::Result<()> {
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(csv, result.to_csv(config))?;
    if result
        .records
        .iter()
        .any(|r| r.outcome.as_ref().is_ok_and(|o| !o.sampled_kl.is_empty()))
    {
        std::fs::write(cdf_path(csv), result.cdf_csv())?;
    }
    let manifest = Manifest {
        command,
        config,
        jobs,
        git_describe: git_describe(),
        wall_time_s: wall.as_secs_f64(),
        rows: result.records.len(),
        failures: result.failures(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    std::fs::write(manifest_path(csv), text + "\n")
}
