//! Command-line runner.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinquench::mitigation::MitigationConfig;
use spinquench::observables::parse_results_csv;
use spinquench::runner::{
    bundled_series, compare_fixture, mae_reproduction_text, reproduce_mae_summary, run, series_from_results,
    ExperimentConfig, Workload,
};
use spinquench::Error;

#[derive(Parser)]
#[command(name = "spinquench", version, about = "XXZ quench simulation with error mitigation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (INI-style `key = value` sections).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "SPINQUENCH_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Staggered magnetization without mitigation.
    Simulate(RunArgs),
    /// Staggered magnetization with the configured mitigation.
    Mitigate(RunArgs),
    /// Rényi-2 entropy from randomized measurements.
    Entropy(RunArgs),
    /// Magnetization for every method of the QEM sweep.
    Sweep(RunArgs),
    /// Mean absolute error against a bundled series. Without `--results`,
    /// recomputes the bundled MAE summary from the bundled hardware series.
    Compare {
        /// A `results.csv` written by `simulate` or `mitigate`.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Bundled series as `table:series`.
        #[arg(long, default_value = "reference_n20:OBC")]
        reference: String,
        /// Also write the report into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Parse { .. } | Error::MissingKey(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(args: &RunArgs, workload: Workload) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::from_path(&args.config).map_err(|e| match e {
        Error::Io(m) => Failure::Usage(m),
        e => Failure::Usage(e.to_string()),
    })?;
    cfg.workload = workload;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (args, workload, raw) = match &cli.command {
        Command::Simulate(a) => (a, Workload::Magnetization, true),
        Command::Mitigate(a) => (a, Workload::Magnetization, false),
        Command::Entropy(a) => (a, Workload::Entropy, false),
        Command::Sweep(a) => (a, Workload::SweepQem, false),
        Command::Compare { results, reference, out } => return compare(results.as_ref(), reference, out.as_ref()),
    };
    let mut cfg = load(args, workload)?;
    if raw {
        cfg.mitigation = MitigationConfig::none();
    }
    let outcome = run(&cfg, &cfg.out_dir.clone())?;
    print!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn compare(results: Option<&PathBuf>, reference: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    let text = match results {
        Some(path) => {
            let csv = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let rows = parse_results_csv(&csv)?;
            let reference_series = bundled_series(reference).map_err(|e| Failure::Usage(e.to_string()))?;
            compare_fixture(&path.display().to_string(), &series_from_results(&rows), &reference_series)?.to_text()
        }
        None => mae_reproduction_text(&reproduce_mae_summary()?),
    };
    print!("{text}");
    if let Some(dir) = out {
        spinquench::runner::write_atomic(&dir.join("compare.csv"), &text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
