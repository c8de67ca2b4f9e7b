//! Configuration files, workloads, bundled comparison fixtures and result
//! files.
//!
//! A run writes into one output directory:
//!
//! - `config.ini`: the fully resolved configuration
//! - `results.csv` / `entropy.csv` / `sweep_<METHOD>.csv`: result tables
//! - `report.json`: per-step mitigation details of every repetition
//! - `manifest.json`: config hash, seed, version and a SHA-256 per file
//! - `manifest.timestamps.json`: wall-clock times, kept apart so the other
//!   files are byte-identical between reruns

mod config;
mod fixtures;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{EntropySettings, ExperimentConfig, IniDocument, Workload};
pub use fixtures::{
    bundled_mae_summary, bundled_resources, bundled_series, compare_fixture, mae_reproduction_text,
    reproduce_mae_summary, series_from_results, FixturePoint, FixtureTable, MaeCell, MaeReport, MaeReproduction,
    ResourceRow, BUNDLED_SERIES_TABLES,
};

use crate::entropy::{estimate_renyi2, EntropyRecord, RmOptions};
use crate::mitigation::{run_mitigated_experiment_with, MitigationConfig, RunOptions, StepReport, SWEEP_PRESETS};
use crate::model::{build_trotter_circuit, neel_state};
use crate::observables::{mean_absolute_error, results_csv, ObservableSpec, ResultRow};
use crate::sim::rng::derive_seed;
use crate::sim::{apply_circuit, exact_purity, reduced_density_matrix};
use crate::{Error, Result};

/// Largest chain the statevector workloads accept.
pub const SIMULATION_MAX_QUBITS: usize = 24;

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Result rows averaged over repetitions, plus every per-repetition report.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationRun {
    pub rows: Vec<ResultRow>,
    pub repetitions: Vec<Vec<StepReport>>,
}

impl MagnetizationRun {
    /// MAE of the averaged mitigated values against the noiseless Trotter
    /// reference.
    pub fn mae(&self) -> Result<f64> {
        let mut est = Vec::with_capacity(self.rows.len());
        let mut refs = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            refs.push(r.reference.ok_or_else(|| Error::InvalidParameter("rows carry no reference".into()))?);
            est.push(r.mitigated);
        }
        mean_absolute_error(&est, &refs)
    }
}

fn check_size(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.params.n_qubits > SIMULATION_MAX_QUBITS {
        return Err(Error::TooLarge { n: cfg.params.n_qubits, limit: SIMULATION_MAX_QUBITS });
    }
    Ok(())
}

/// Runs the magnetization pipeline `cfg.repetitions` times with seeds
/// derived from `(cfg.seed, repetition)`. With more than one repetition the
/// reported error is the standard deviation over repetitions, otherwise the
/// pipeline's standard error.
pub fn run_magnetization(cfg: &ExperimentConfig, mitigation: &MitigationConfig) -> Result<MagnetizationRun> {
    check_size(cfg)?;
    let obs = ObservableSpec::staggered(cfg.params.n_qubits);
    let opts = RunOptions {
        order: cfg.order,
        trajectories_per_job: cfg.trajectories,
        initial: None,
        with_reference: true,
    };
    let mut reps = Vec::with_capacity(cfg.repetitions);
    for r in 0..cfg.repetitions {
        let seed = derive_seed(cfg.seed, &[r as u64]);
        reps.push(run_mitigated_experiment_with(&cfg.params, &cfg.noise, mitigation, &obs, cfg.shots, seed, &opts)?);
    }
    let rows = (0..cfg.params.n_steps)
        .map(|k| {
            let first = &reps[0][k];
            let raw: Vec<f64> = reps.iter().map(|rep| rep[k].raw).collect();
            let mit: Vec<f64> = reps.iter().map(|rep| rep[k].mitigated).collect();
            let (raw, _) = mean_sd(&raw);
            let (mitigated, sd) = mean_sd(&mit);
            ResultRow {
                step: first.step,
                time: first.time,
                raw,
                mitigated,
                std_error: if reps.len() > 1 { sd } else { first.std_error },
                reference: first.reference,
            }
        })
        .collect();
    Ok(MagnetizationRun { rows, repetitions: reps })
}

/// Entropy records for the configured steps, averaged over repetitions.
pub fn run_entropy(cfg: &ExperimentConfig) -> Result<(Vec<EntropyRecord>, Vec<Vec<String>>)> {
    check_size(cfg)?;
    let e = &cfg.entropy;
    let steps: Vec<usize> = if e.steps.is_empty() { (1..=cfg.params.n_steps).collect() } else { e.steps.clone() };
    let initial = neel_state(cfg.params.n_qubits)?;
    let noisy = !cfg.noise.is_ideal();
    let mitigated = cfg.mitigation != MitigationConfig::none();
    let mut records = Vec::with_capacity(steps.len());
    let mut flags = Vec::with_capacity(steps.len());
    for &m in &steps {
        let circuit = build_trotter_circuit(&cfg.params.with_steps(m), cfg.order)?;
        let mut s2 = Vec::with_capacity(cfg.repetitions);
        let mut se = 0.0;
        let mut step_flags = Vec::new();
        for r in 0..cfg.repetitions {
            let opts = RmOptions {
                n_instances: e.n_instances,
                shots: Some(cfg.shots),
                seed: derive_seed(cfg.seed, &[r as u64, m as u64]),
                unbiased: e.unbiased,
                noise: noisy.then(|| cfg.noise.clone()),
                mitigation: mitigated.then(|| cfg.mitigation.clone()),
                trajectories_per_job: cfg.trajectories,
            };
            let est = estimate_renyi2(&circuit, &initial, &e.subsystem, &opts)?;
            se = est.std_error;
            for f in est.flags {
                if !step_flags.contains(&f) {
                    step_flags.push(f);
                }
            }
            s2.push(est.renyi2);
        }
        let (mean, sd) = mean_sd(&s2);
        let state = apply_circuit(initial.clone(), &circuit)?;
        let exact = -exact_purity(&reduced_density_matrix(&state, &e.subsystem)?).ln();
        records.push(EntropyRecord {
            time: m as f64 * cfg.params.dt,
            s2_estimate: mean,
            s2_std_error: if s2.len() > 1 { sd } else { se },
            s2_exact: Some(exact),
            n_u: e.n_instances,
            shots: Some(cfg.shots),
        });
        flags.push(step_flags);
    }
    Ok((records, flags))
}

pub const ENTROPY_CSV_HEADER: &str = "time,s2_estimate,s2_std_error,s2_exact,n_u,shots";

pub fn entropy_csv(records: &[EntropyRecord]) -> String {
    let mut s = format!("{ENTROPY_CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(
            s,
            "{:.6},{:.10},{:.10},{},{},{}",
            r.time,
            r.s2_estimate,
            r.s2_std_error,
            r.s2_exact.map(|x| format!("{x:.10}")).unwrap_or_default(),
            r.n_u,
            r.shots.map(|x| x.to_string()).unwrap_or_default()
        );
    }
    s
}

/// The sweep method with the sampling settings of `base`.
pub fn sweep_config(preset: &str, base: &MitigationConfig) -> Result<MitigationConfig> {
    let mut c = MitigationConfig::preset(preset)?;
    c.trex.n_samples = base.trex.n_samples;
    c.pt.n_copies = base.pt.n_copies;
    c.dd.spec = base.dd.spec.clone();
    Ok(c)
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    workload: String,
    config_hash: String,
    seed: u64,
    files: BTreeMap<String, String>,
}

/// Collects output files and writes them with the manifest.
struct Output {
    dir: PathBuf,
    config_hash: String,
    files: BTreeMap<String, String>,
}

impl Output {
    fn new(dir: &Path, cfg: &ExperimentConfig) -> Result<Output> {
        std::fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), config_hash: cfg.hash(), files: BTreeMap::new() })
    }

    /// Tables get a `# config_sha256=` first line.
    fn table(&mut self, name: &str, body: &str) -> Result<()> {
        self.write(name, &format!("# config_sha256={}\n{body}", self.config_hash))
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        write_atomic(&self.dir.join(name), contents)?;
        self.files.insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    fn finish(mut self, cfg: &ExperimentConfig, started: u64) -> Result<Vec<PathBuf>> {
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION"),
            workload: cfg.workload.to_string(),
            config_hash: self.config_hash.clone(),
            seed: cfg.seed,
            files: self.files.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))? + "\n";
        self.write("manifest.json", &text)?;
        let finished = unix_seconds();
        write_atomic(
            &self.dir.join("manifest.timestamps.json"),
            &format!("{{\n  \"started_unix\": {started},\n  \"finished_unix\": {finished}\n}}\n"),
        )?;
        let mut paths: Vec<PathBuf> = self.files.keys().map(|k| self.dir.join(k)).collect();
        paths.push(self.dir.join("manifest.timestamps.json"));
        Ok(paths)
    }
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Short human-readable summary for the terminal.
    pub summary: String,
}

/// Executes the configured workload and writes its files into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let started = unix_seconds();
    let mut out = Output::new(out_dir, cfg)?;
    out.write("config.ini", &cfg.to_ini())?;
    let mut summary = String::new();
    match cfg.workload {
        Workload::Magnetization => {
            let run = run_magnetization(cfg, &cfg.mitigation)?;
            out.table("results.csv", &results_csv(&run.rows))?;
            out.write("report.json", &to_json(&run.repetitions)?)?;
            let _ = writeln!(summary, "{} MAE vs noiseless Trotter reference: {:.5}", cfg.mitigation.label(), run.mae()?);
        }
        Workload::Entropy => {
            let (records, flags) = run_entropy(cfg)?;
            out.table("entropy.csv", &entropy_csv(&records))?;
            out.write("report.json", &to_json(&flags)?)?;
            for r in &records {
                let _ = writeln!(
                    summary,
                    "t={:.2} S2={:.4} ± {:.4} (statevector {:.4})",
                    r.time,
                    r.s2_estimate,
                    r.s2_std_error,
                    r.s2_exact.unwrap_or(f64::NAN)
                );
            }
        }
        Workload::SweepQem => {
            let mut table = String::from("method,mae\n");
            let mut reports = BTreeMap::new();
            for preset in SWEEP_PRESETS {
                let mitigation = sweep_config(preset, &cfg.mitigation)?;
                let run = run_magnetization(cfg, &mitigation)?;
                let mae = run.mae()?;
                out.table(&format!("sweep_{preset}.csv"), &results_csv(&run.rows))?;
                let _ = writeln!(table, "{preset},{mae:.6}");
                let _ = writeln!(summary, "{preset:<12} MAE {mae:.5}");
                reports.insert(preset.to_string(), run.repetitions);
            }
            out.table("sweep_summary.csv", &table)?;
            out.write("report.json", &to_json(&reports)?)?;
        }
    }
    let files = out.finish(cfg, started)?;
    Ok(RunOutcome { files, summary })
}
