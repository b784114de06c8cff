use clap::{Args, Parser, Subcommand};
use irs_covert_experiment::config::ScenarioConfig;
use irs_covert_experiment::sweep::{run_sweep, write_outputs, MAX_FAILURE_FRACTION};
use irs_covert_experiment::{validate, Mode};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "irs-covert", version, about = "Covert IRS beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Alternating design with perfect warden channel knowledge.
    Perfect(RunArgs),
    /// Discrete-phase design.
    Discrete(RunArgs),
    /// Robust designs under ellipsoidal warden channel errors.
    Robust(RunArgs),
    /// Warden detection statistics of robust designs.
    Detect(RunArgs),
    /// All methods listed in the config.
    Sweep(RunArgs),
    /// Quick oracle checks of the solver and closed forms.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON scenario file; built-in reference scenario if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn run(mode: Mode, args: RunArgs) -> Result<bool, String> {
    let mut config = match &args.config {
        Some(path) => ScenarioConfig::load(path).map_err(|e| e.to_string())?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    let config = mode.apply(config);
    config.validate().map_err(|e| e.to_string())?;
    let out = args
        .out
        .or_else(|| config.output_path.clone())
        .unwrap_or_else(|| PathBuf::from(format!("results/{}.csv", mode.name())));

    let start = Instant::now();
    let result = run_sweep(&config, args.jobs).map_err(|e| e.to_string())?;
    write_outputs(&out, mode.name(), &config, args.jobs, &result, start.elapsed())
        .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    eprintln!(
        "{} trials, {} failed, wrote {}",
        result.records.len(),
        result.failures(),
        out.display()
    );
    if !result.acceptable() {
        eprintln!(
            "failure fraction {:.3} exceeds {MAX_FAILURE_FRACTION}",
            result.failure_fraction()
        );
    }
    Ok(result.acceptable())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Validate { seed } => {
            let checks = validate::run_all(seed);
            for c in &checks {
                println!("{c}");
            }
            return if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
        Command::Perfect(a) => (Mode::Perfect, a),
        Command::Discrete(a) => (Mode::Discrete, a),
        Command::Robust(a) => (Mode::Robust, a),
        Command::Detect(a) => (Mode::Detect, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    match run(mode, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
