use serde::{Deserialize, Serialize};

use super::{build_rm_circuits, RandomUnitaryBatch};
use crate::mitigation::{execute_level, zne_extrapolate, zne_fold, MitigationConfig, ZnePoint};
use crate::noise::NoiseModel;
use crate::sim::rng::{derive_seed, stream};
use crate::sim::{apply_circuit, cumulative, sample_from_cdf, Circuit, CountsHistogram, Distribution, StateVector};
use crate::{Error, Result};

/// `2^L Σ_{j,j'} (−2)^{−D(j,j')} w(j, j')` over observed outcomes.
fn x_a_sum(outcomes: &[(u64, f64)], l: usize, pair: impl Fn(usize, usize) -> f64) -> f64 {
    let mut sum = 0.0;
    for (i, &(a, _)) in outcomes.iter().enumerate() {
        for (j, &(b, _)) in outcomes.iter().enumerate() {
            let d = (a ^ b).count_ones() as i32;
            sum += (-0.5f64).powi(d) * pair(i, j);
        }
    }
    sum * 2f64.powi(l as i32)
}

/// Plug-in estimator with empirical probabilities (diagonal terms included).
pub fn estimate_x_a(counts: &CountsHistogram, l: usize) -> Result<f64> {
    if counts.width() != l {
        return Err(Error::WidthMismatch { expected: l, got: counts.width() });
    }
    let shots = counts.total() as f64;
    if shots == 0.0 {
        return Err(Error::EmptyCounts);
    }
    let p: Vec<(u64, f64)> = counts.iter().map(|(k, c)| (k, c as f64 / shots)).collect();
    Ok(x_a_sum(&p, l, |i, j| p[i].1 * p[j].1))
}

/// Unbiased variant: `P(j)P(j')` becomes `n_j (n_{j'} − δ_{jj'}) / (S(S−1))`.
pub fn estimate_x_a_unbiased(counts: &CountsHistogram, l: usize) -> Result<f64> {
    if counts.width() != l {
        return Err(Error::WidthMismatch { expected: l, got: counts.width() });
    }
    let s = counts.total() as f64;
    if s < 2.0 {
        return Err(Error::EmptyCounts);
    }
    let c: Vec<(u64, f64)> = counts.iter().map(|(k, n)| (k, n as f64)).collect();
    let norm = s * (s - 1.0);
    Ok(x_a_sum(&c, l, |i, j| c[i].1 * (c[j].1 - if i == j { 1.0 } else { 0.0 }) / norm))
}

/// Infinite-shot `X_a`.
pub fn x_a_from_distribution(dist: &Distribution) -> f64 {
    let p: Vec<(u64, f64)> = dist.iter().collect();
    x_a_sum(&p, dist.width(), |i, j| p[i].1 * p[j].1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmOptions {
    pub n_instances: usize,
    /// `None` uses exact outcome probabilities.
    pub shots: Option<u64>,
    pub seed: u64,
    pub unbiased: bool,
    pub noise: Option<NoiseModel>,
    pub mitigation: Option<MitigationConfig>,
    pub trajectories_per_job: u64,
}

impl Default for RmOptions {
    fn default() -> Self {
        RmOptions {
            n_instances: 60,
            shots: Some(100_000),
            seed: 0,
            unbiased: false,
            noise: None,
            mitigation: None,
            trajectories_per_job: 10,
        }
    }
}

impl RmOptions {
    /// Seed of the unitary batch.
    pub fn batch_seed(&self) -> u64 {
        derive_seed(self.seed, &[0])
    }

    /// Master seed of the measurement streams; instance `i` samples from
    /// stream `(sampling_seed, i)`.
    pub fn sampling_seed(&self) -> u64 {
        derive_seed(self.seed, &[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityEstimate {
    pub x_values: Vec<f64>,
    pub mean: f64,
    pub mean_std_error: f64,
    /// `−ln X̄`.
    pub renyi2: f64,
    /// Standard error of `renyi2`, `σ_X̄ / X̄`.
    pub std_error: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zne_points: Vec<ZnePoint>,
    pub flags: Vec<String>,
}

/// One line of an entropy results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub time: f64,
    pub s2_estimate: f64,
    pub s2_std_error: f64,
    pub s2_exact: Option<f64>,
    pub n_u: usize,
    pub shots: Option<u64>,
}

fn mean_and_error(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn x_of(counts: &CountsHistogram, l: usize, unbiased: bool) -> Result<f64> {
    if unbiased {
        estimate_x_a_unbiased(counts, l)
    } else {
        estimate_x_a(counts, l)
    }
}

/// Noiseless per-instance histograms of the randomized-measurement batch
/// for `base|initial⟩`. Instance `i` draws its shots one by one by inverse
/// CDF from stream `(opts.sampling_seed(), i)`.
pub fn rm_instance_counts(
    base: &Circuit,
    initial: &StateVector,
    subsystem: &[usize],
    opts: &RmOptions,
) -> Result<Vec<CountsHistogram>> {
    let shots = opts
        .shots
        .ok_or_else(|| Error::InvalidParameter("sampling needs a shot count".into()))?;
    let state = apply_circuit(initial.clone(), base)?;
    let batch = RandomUnitaryBatch::sample(opts.n_instances, subsystem.len(), opts.batch_seed());
    let circuits = build_rm_circuits(&Circuit::new(base.n_qubits()), subsystem, &batch)?;
    let seed = opts.sampling_seed();
    circuits
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let probs = apply_circuit(state.clone(), c)?.marginal(c.measured())?;
            Ok(sample_from_cdf(&cumulative(&probs), shots, c.measured().len(), &mut stream(seed, &[i as u64])))
        })
        .collect()
}

/// Purity and entropy from per-instance histograms over `l` bits.
pub fn purity_from_counts(counts: &[CountsHistogram], l: usize, unbiased: bool) -> Result<PurityEstimate> {
    if counts.len() < 2 {
        return Err(Error::InvalidParameter("at least two random-unitary instances".into()));
    }
    let x_values: Vec<f64> = counts.iter().map(|h| x_of(h, l, unbiased)).collect::<Result<_>>()?;
    let (mean, se) = mean_and_error(&x_values);
    finish(x_values, mean, se, l, Vec::new())
}

fn finish(x_values: Vec<f64>, mean: f64, mean_std_error: f64, l: usize, zne_points: Vec<ZnePoint>) -> Result<PurityEstimate> {
    if !(mean > 0.0) {
        return Err(Error::EstimateFailed(format!("mean purity estimate {mean:.6} is not positive")));
    }
    let mut flags = Vec::new();
    let floor = 2f64.powi(-(l as i32));
    if mean < floor - 3.0 * mean_std_error || mean > 1.0 + 3.0 * mean_std_error {
        flags.push("purity_out_of_bounds".to_string());
    }
    if !zne_points.is_empty() {
        flags.push("zne_extrapolates_mean_purity".to_string());
    }
    Ok(PurityEstimate {
        x_values,
        mean,
        mean_std_error,
        renyi2: -mean.ln(),
        std_error: mean_std_error / mean,
        zne_points,
        flags,
    })
}

/// Randomized-measurement estimate of `S₂` for `subsystem` of the state
/// `base|initial⟩`.
pub fn estimate_renyi2(
    base: &Circuit,
    initial: &StateVector,
    subsystem: &[usize],
    opts: &RmOptions,
) -> Result<PurityEstimate> {
    if opts.n_instances < 2 {
        return Err(Error::InvalidParameter("at least two random-unitary instances".into()));
    }
    if subsystem.is_empty() {
        return Err(Error::EmptyMeasurement);
    }
    if subsystem.len() >= base.n_qubits() {
        return Err(Error::InvalidParameter("subsystem must be a proper subset".into()));
    }
    let l = subsystem.len();
    let batch = RandomUnitaryBatch::sample(opts.n_instances, l, opts.batch_seed());
    let noisy = opts.noise.as_ref().is_some_and(|n| !n.is_ideal()) || opts.mitigation.is_some();

    if !noisy {
        if opts.shots.is_some() {
            return purity_from_counts(&rm_instance_counts(base, initial, subsystem, opts)?, l, opts.unbiased);
        }
        let state = apply_circuit(initial.clone(), base)?;
        let circuits = build_rm_circuits(&Circuit::new(base.n_qubits()), subsystem, &batch)?;
        let x_values: Vec<f64> = circuits
            .iter()
            .map(|c| Ok(x_a_from_distribution(&apply_circuit(state.clone(), c)?.distribution(c.measured())?)))
            .collect::<Result<_>>()?;
        let (mean, se) = mean_and_error(&x_values);
        return finish(x_values, mean, se, l, Vec::new());
    }

    let shots = opts
        .shots
        .ok_or_else(|| Error::InvalidParameter("noisy randomized measurements need a shot count".into()))?;
    let noise = opts.noise.clone().unwrap_or_default();
    let config = opts.mitigation.clone().unwrap_or_default();
    let factors = if config.zne.enabled { config.zne.fold_factors.clone() } else { vec![1] };
    let circuits = build_rm_circuits(base, subsystem, &batch)?;
    let mut levels = Vec::with_capacity(factors.len());
    for (li, &f) in factors.iter().enumerate() {
        let mut xs = Vec::with_capacity(circuits.len());
        for (i, c) in circuits.iter().enumerate() {
            let folded = zne_fold(c, f)?;
            let (clusters, _) = execute_level(
                &folded,
                initial,
                &noise,
                &config,
                shots,
                opts.trajectories_per_job,
                opts.sampling_seed(),
                &[li as u64, i as u64],
            )?;
            let mut merged = CountsHistogram::new(l);
            for h in &clusters {
                merged.merge(h)?;
            }
            xs.push(x_of(&merged, l, opts.unbiased)?);
        }
        levels.push(xs);
    }
    if factors.len() == 1 {
        let xs = levels.pop().expect("one level");
        let (mean, se) = mean_and_error(&xs);
        return finish(xs, mean, se, l, Vec::new());
    }
    let points: Vec<ZnePoint> = factors
        .iter()
        .zip(&levels)
        .map(|(&f, xs)| {
            let (value, std_error) = mean_and_error(xs);
            ZnePoint { factor: f as f64, value, std_error }
        })
        .collect();
    let est = zne_extrapolate(&points, config.zne.fit)?;
    finish(levels.swap_remove(0), est.mitigated, est.std_error, l, points)
}

/// [`estimate_renyi2`] for a prepared state (no circuit before the
/// rotations).
pub fn estimate_renyi2_state(state: &StateVector, subsystem: &[usize], opts: &RmOptions) -> Result<PurityEstimate> {
    estimate_renyi2(&Circuit::new(state.n_qubits()), state, subsystem, opts)
}
