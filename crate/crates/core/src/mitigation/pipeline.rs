use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    dd_insert, pauli_twirl, sm_mitigate_with_errors, trex_expand, zne_extrapolate, zne_fold, MitigatedEstimate,
    MitigationConfig, ZnePoint,
};
use crate::model::{build_sm_test_circuit, build_trotter_circuit, neel_state, TrotterOrder, XXZParams};
use crate::noise::{noisy_execute_detailed, NoiseModel};
use crate::observables::ObservableSpec;
use crate::sim::rng::derive_seed;
use crate::sim::{apply_circuit, Circuit, CountsHistogram, StateVector};
use crate::{Error, Result};

/// Knobs of the pipeline that are not mitigation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub order: TrotterOrder,
    /// Noise trajectories per executed circuit.
    pub trajectories_per_job: u64,
    /// Defaults to the Néel state.
    pub initial: Option<StateVector>,
    /// Attach the noiseless Trotter value of each step as the reference.
    pub with_reference: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            order: TrotterOrder::SecondOptimized,
            trajectories_per_job: 10,
            initial: None,
            with_reference: true,
        }
    }
}

/// One record of the mitigation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    pub time: f64,
    pub raw: f64,
    pub mitigated: f64,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zne_points: Vec<ZnePoint>,
    pub circuits_executed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    pub estimate: MitigatedEstimate,
    pub meta: BTreeMap<String, String>,
}

#[derive(Clone, Copy)]
enum Role {
    Target = 0,
    Test = 1,
}

/// Value and cluster-robust standard error of one noise level. Shots from
/// one trajectory share a noisy state, so trajectories are the independent
/// units.
#[derive(Debug, Clone, Copy)]
struct LevelResult {
    value: f64,
    std_error: f64,
    jobs: usize,
}

fn cluster_estimate(clusters: &[CountsHistogram], obs: &ObservableSpec) -> Result<(f64, f64)> {
    let means: Vec<f64> = clusters.iter().map(|c| obs.estimate(c).map(|e| e.0)).collect::<Result<_>>()?;
    let k = means.len() as f64;
    let mean = means.iter().sum::<f64>() / k;
    if means.len() < 2 {
        let mut all = CountsHistogram::new(clusters[0].width());
        for c in clusters {
            all.merge(c)?;
        }
        return obs.estimate(&all);
    }
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok((mean, (var / k).sqrt()))
}

struct Job {
    circuit: Circuit,
    mask: u64,
    seed: u64,
}

/// Applies PT, DD and TREX to `base`, executes every resulting circuit under
/// `noise`, and returns the per-trajectory histograms with TREX flips undone,
/// plus the number of circuits executed. The shot budget is split evenly.
#[allow(clippy::too_many_arguments)]
pub(crate) fn execute_level(
    base: &Circuit,
    initial: &StateVector,
    noise: &NoiseModel,
    config: &MitigationConfig,
    shots: u64,
    trajectories_per_job: u64,
    seed: u64,
    key: &[u64],
) -> Result<(Vec<CountsHistogram>, usize)> {
    let sub = |extra: &[u64]| {
        let mut k = key.to_vec();
        k.extend_from_slice(extra);
        derive_seed(seed, &k)
    };
    let copies = if config.pt.enabled {
        pauli_twirl(base, config.pt.n_copies, sub(&[0x5054]))?
    } else {
        vec![base.clone()]
    };
    let mut jobs = Vec::new();
    for (ci, copy) in copies.into_iter().enumerate() {
        let copy = if config.dd.enabled { dd_insert(&copy, &config.dd.spec)? } else { copy };
        let expanded = if config.trex.enabled {
            trex_expand(&copy, config.trex.n_samples, sub(&[ci as u64, 0x5452]))?
        } else {
            vec![(copy, 0)]
        };
        for (si, (circuit, mask)) in expanded.into_iter().enumerate() {
            jobs.push(Job { circuit, mask, seed: sub(&[ci as u64, si as u64]) });
        }
    }
    let per_job = shots / jobs.len() as u64;
    let traj = trajectories_per_job.clamp(1, per_job.max(1));
    let per_job = per_job - per_job % traj;
    if per_job == 0 {
        return Err(Error::InvalidParameter(format!("{shots} shots cannot cover {} circuits", jobs.len())));
    }
    let clusters: Vec<Vec<CountsHistogram>> = jobs
        .par_iter()
        .map(|j| {
            let run = noisy_execute_detailed(&j.circuit, initial, noise, per_job, traj, j.seed)?;
            Ok(run.per_trajectory.into_iter().map(|c| c.xor(j.mask)).collect())
        })
        .collect::<Result<_>>()?;
    Ok((clusters.into_iter().flatten().collect(), jobs.len()))
}

#[allow(clippy::too_many_arguments)]
fn run_level(
    base: &Circuit,
    initial: &StateVector,
    noise: &NoiseModel,
    config: &MitigationConfig,
    obs: &ObservableSpec,
    shots: u64,
    opts: &RunOptions,
    seed: u64,
    key: [u64; 3],
) -> Result<LevelResult> {
    let (clusters, jobs) =
        execute_level(base, initial, noise, config, shots, opts.trajectories_per_job, seed, &key)?;
    let (value, std_error) = cluster_estimate(&clusters, obs)?;
    Ok(LevelResult { value, std_error, jobs })
}

/// Runs the mitigation pipeline for every Trotter step `1..=params.n_steps`
/// with default [`RunOptions`].
pub fn run_mitigated_experiment(
    params: &XXZParams,
    noise: &NoiseModel,
    config: &MitigationConfig,
    observable: &ObservableSpec,
    shots: u64,
    seed: u64,
) -> Result<Vec<StepReport>> {
    run_mitigated_experiment_with(params, noise, config, observable, shots, seed, &RunOptions::default())
}

/// Per step: build the target (and SM test) circuit, fold, twirl, insert DD,
/// expand TREX, execute under noise, collapse, average and extrapolate or
/// rescale. Job seeds depend only on `(seed, step, role, level, copy,
/// sample)`.
pub fn run_mitigated_experiment_with(
    params: &XXZParams,
    noise: &NoiseModel,
    config: &MitigationConfig,
    observable: &ObservableSpec,
    shots: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<Vec<StepReport>> {
    params.validate()?;
    noise.validate()?;
    config.validate()?;
    if observable.n_sites != params.n_qubits {
        return Err(Error::WidthMismatch { expected: params.n_qubits, got: observable.n_sites });
    }
    let initial = match &opts.initial {
        Some(s) => s.clone(),
        None => neel_state(params.n_qubits)?,
    };
    let use_zne = config.zne.enabled && !config.sm.enabled;
    let factors: Vec<usize> = if use_zne { config.zne.fold_factors.clone() } else { vec![1] };

    let mut reports = Vec::with_capacity(params.n_steps);
    for m in 1..=params.n_steps {
        let p = params.with_steps(m);
        let target = build_trotter_circuit(&p, opts.order)?;
        let mut meta = BTreeMap::new();
        meta.insert("config".to_string(), config.label());
        if config.pt.enabled {
            meta.insert("pt_shots".into(), "split".into());
        }
        if config.zne.enabled && config.sm.enabled {
            meta.insert("warning".into(), "SM and ZNE both requested: ZNE skipped".into());
        }
        let mut circuits_executed = 0;
        let mut points = Vec::with_capacity(factors.len());
        for (li, &f) in factors.iter().enumerate() {
            let folded = zne_fold(&target, f)?;
            let r = run_level(
                &folded,
                &initial,
                noise,
                config,
                observable,
                shots,
                opts,
                seed,
                [m as u64, Role::Target as u64, li as u64],
            )?;
            circuits_executed += r.jobs;
            points.push(ZnePoint { factor: f as f64, value: r.value, std_error: r.std_error });
        }
        let mut estimate = if use_zne {
            zne_extrapolate(&points, config.zne.fit)?
        } else {
            MitigatedEstimate::unmitigated(points[0].value, points[0].std_error)
        };
        if config.sm.enabled {
            let test = build_sm_test_circuit(&p)?;
            if let Some(v) = test.meta.get("sm_odd_steps") {
                meta.insert("sm_odd_steps".into(), v.clone());
            }
            let test_ideal = observable.exact(&apply_circuit(initial.clone(), &test)?)?;
            let r = run_level(
                &test,
                &initial,
                noise,
                config,
                observable,
                shots,
                opts,
                seed,
                [m as u64, Role::Test as u64, 0],
            )?;
            circuits_executed += r.jobs;
            let mut sm = sm_mitigate_with_errors(
                (points[0].value, points[0].std_error),
                (r.value, r.std_error),
                test_ideal,
            );
            sm.breakdown.zne_points = Vec::new();
            estimate = sm;
        }
        let reference = if opts.with_reference {
            Some(observable.exact(&apply_circuit(initial.clone(), &target)?)?)
        } else {
            None
        };
        reports.push(StepReport {
            step: m,
            time: m as f64 * params.dt,
            raw: estimate.raw,
            mitigated: estimate.mitigated,
            std_error: estimate.std_error,
            p: estimate.breakdown.sm_p,
            zne_points: if use_zne { points } else { Vec::new() },
            circuits_executed,
            reference,
            estimate,
            meta,
        });
    }
    Ok(reports)
}
