use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{confuse_outcome, NoiseModel};
use crate::sim::rng::{derive_seed, stream};
use crate::sim::{Circuit, CountsHistogram, Gate, Layer, Pauli, Qubits, StateVector};
use crate::{Error, Result};

/// A Pauli error drawn after the two-qubit gate on `qubits` in `layer`.
/// `label[k]` acts on `qubits[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertedError {
    pub layer: usize,
    pub qubits: Vec<usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub index: u64,
    pub seed: u64,
    pub inserted_errors: Vec<InsertedError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyRun {
    /// Sum over trajectories.
    pub counts: CountsHistogram,
    pub per_trajectory: Vec<CountsHistogram>,
    pub trajectories: Vec<Trajectory>,
}

fn pauli_from_char(c: char) -> Option<Pauli> {
    Pauli::ALL.into_iter().find(|p| p.label() == c)
}

enum ErrorSource<'a> {
    Draw(&'a mut crate::sim::rng::StreamRng, Vec<InsertedError>),
    Replay(&'a [InsertedError], usize),
}

impl ErrorSource<'_> {
    fn after_two_qubit(&mut self, state: &mut StateVector, layer: usize, a: usize, b: usize, p2: f64) -> Result<()> {
        match self {
            ErrorSource::Draw(rng, log) => {
                if p2 > 0.0 && rng.random::<f64>() < p2 {
                    let k: usize = rng.random_range(1..16);
                    let (pa, pb) = (Pauli::ALL[k % 4], Pauli::ALL[k / 4]);
                    state.apply_pauli(a, pa);
                    state.apply_pauli(b, pb);
                    log.push(InsertedError {
                        layer,
                        qubits: vec![a, b],
                        label: [pa.label(), pb.label()].iter().collect(),
                    });
                }
            }
            ErrorSource::Replay(errors, next) => {
                if let Some(e) = errors.get(*next) {
                    if e.layer == layer && e.qubits == [a, b] {
                        for (q, c) in e.qubits.iter().zip(e.label.chars()) {
                            let p = pauli_from_char(c)
                                .ok_or_else(|| Error::InvalidParameter(format!("bad Pauli label `{}`", e.label)))?;
                            state.apply_pauli(*q, p);
                        }
                        *next += 1;
                    }
                }
            }
        }
        Ok(())
    }
}

fn noisy_layer(
    state: &mut StateVector,
    layer: &Layer,
    index: usize,
    noise: &NoiseModel,
    source: &mut ErrorSource<'_>,
) -> Result<()> {
    for g in &layer.gates {
        state.apply_unchecked(g);
        if let Qubits::Two(a, b) = g.qubits {
            source.after_two_qubit(state, index, a, b, noise.p2)?;
            if noise.eps2 != 0.0 {
                state.apply_rzz(a, b, noise.eps2);
            }
        }
    }
    let omega = noise.idle_z;
    if omega == 0.0 && layer.pulses.is_empty() {
        return Ok(());
    }
    for q in 0..state.n_qubits() {
        if layer.touches(q) {
            continue;
        }
        let mut pulses: Vec<_> = layer.pulses.iter().filter(|p| p.qubit == q).collect();
        pulses.sort_by(|x, y| x.at.total_cmp(&y.at));
        let mut t = 0.0;
        for p in pulses {
            if omega != 0.0 && p.at > t {
                state.apply_rz(q, omega * (p.at - t));
            }
            state.apply_unchecked(&Gate { kind: p.kind, qubits: Qubits::One(q) });
            t = p.at + p.width;
        }
        if omega != 0.0 && layer.duration > t {
            state.apply_rz(q, omega * (layer.duration - t));
        }
    }
    Ok(())
}

fn evolve(circuit: &Circuit, initial: &StateVector, noise: &NoiseModel, source: &mut ErrorSource<'_>) -> Result<StateVector> {
    if circuit.n_qubits() != initial.n_qubits() {
        return Err(Error::QubitCountMismatch { expected: initial.n_qubits(), got: circuit.n_qubits() });
    }
    let mut state = initial.clone();
    for (i, layer) in circuit.layers().iter().enumerate() {
        noisy_layer(&mut state, layer, i, noise, source)?;
    }
    Ok(state)
}

/// Final state of a recorded trajectory, with no random draws.
pub fn replay_trajectory(
    circuit: &Circuit,
    initial: &StateVector,
    noise: &NoiseModel,
    trajectory: &Trajectory,
) -> Result<StateVector> {
    evolve(circuit, initial, noise, &mut ErrorSource::Replay(&trajectory.inserted_errors, 0))
}

fn run_one(
    circuit: &Circuit,
    initial: &StateVector,
    noise: &NoiseModel,
    shots: u64,
    index: u64,
    seed: u64,
) -> Result<(CountsHistogram, Trajectory)> {
    let traj_seed = derive_seed(seed, &[index]);
    let mut err_rng = stream(traj_seed, &[0]);
    let mut source = ErrorSource::Draw(&mut err_rng, Vec::new());
    let state = evolve(circuit, initial, noise, &mut source)?;
    let ErrorSource::Draw(_, inserted_errors) = source else { unreachable!() };

    let measured = circuit.measured();
    let probs = state.marginal(measured)?;
    let cdf = crate::sim::cumulative(&probs);
    let readout = noise.readout_for(measured);
    let ideal_readout = readout.iter().all(|r| r.is_ideal());
    let mut meas_rng = stream(traj_seed, &[1]);
    let mut counts = CountsHistogram::new(measured.len());
    for _ in 0..shots {
        let outcome = crate::sim::draw_index(&cdf, meas_rng.random()) as u64;
        let outcome = if ideal_readout { outcome } else { confuse_outcome(outcome, &readout, &mut meas_rng) };
        counts.add(outcome, 1);
    }
    Ok((counts, Trajectory { index, seed: traj_seed, inserted_errors }))
}

/// Runs `n_trajectories` independent noisy trajectories with
/// `shots / n_trajectories` shots each and keeps every per-trajectory record.
pub fn noisy_execute_detailed(
    circuit: &Circuit,
    initial: &StateVector,
    noise: &NoiseModel,
    shots: u64,
    n_trajectories: u64,
    seed: u64,
) -> Result<NoisyRun> {
    noise.validate()?;
    if n_trajectories == 0 || shots == 0 || !shots.is_multiple_of(n_trajectories) {
        return Err(Error::InvalidParameter(format!(
            "{shots} shots cannot be split evenly over {n_trajectories} trajectories"
        )));
    }
    let per = shots / n_trajectories;
    let results: Vec<(CountsHistogram, Trajectory)> = (0..n_trajectories)
        .into_par_iter()
        .map(|t| run_one(circuit, initial, noise, per, t, seed))
        .collect::<Result<_>>()?;
    let mut counts = CountsHistogram::new(circuit.measured().len());
    let mut per_trajectory = Vec::with_capacity(results.len());
    let mut trajectories = Vec::with_capacity(results.len());
    for (c, t) in results {
        counts.merge(&c)?;
        per_trajectory.push(c);
        trajectories.push(t);
    }
    Ok(NoisyRun { counts, per_trajectory, trajectories })
}

/// Aggregated counts of [`noisy_execute_detailed`].
pub fn noisy_execute(
    circuit: &Circuit,
    initial: &StateVector,
    noise: &NoiseModel,
    shots: u64,
    n_trajectories: u64,
    seed: u64,
) -> Result<CountsHistogram> {
    Ok(noisy_execute_detailed(circuit, initial, noise, shots, n_trajectories, seed)?.counts)
}
