//! Rényi-2 entropy from randomized measurements.
//!
//! Each instance rotates every subsystem qubit by an independent Haar
//! unitary and measures the subsystem. For one instance
//! `X_a = 2^L Σ_{j,j'} (−2)^{−D(j,j')} P(j) P(j')`, and the instance mean
//! estimates the purity `Tr ρ_A²`.

mod estimator;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::sim::rng::stream;
use crate::sim::{Circuit, Gate, Layer, Matrix2};
use crate::{Error, Result};

pub use estimator::{
    estimate_renyi2, estimate_renyi2_state, estimate_x_a, estimate_x_a_unbiased, purity_from_counts, rm_instance_counts,
    x_a_from_distribution, EntropyRecord, PurityEstimate, RmOptions,
};

/// Haar-random 2×2 unitary: Gram–Schmidt on a complex Ginibre matrix. The
/// `R` factor of Gram–Schmidt has a positive diagonal, which is the phase
/// fix that makes `Q` Haar distributed.
pub fn sample_cue_unitary<R: Rng>(rng: &mut R) -> Matrix2 {
    let mut g = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let c0 = [g(), g()];
    let c1 = [g(), g()];
    let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
    let q0 = [c0[0] / n0, c0[1] / n0];
    let proj = q0[0].conj() * c1[0] + q0[1].conj() * c1[1];
    let v = [c1[0] - proj * q0[0], c1[1] - proj * q0[1]];
    let n1 = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let q1 = [v[0] / n1, v[1] / n1];
    [[q0[0], q1[0]], [q0[1], q1[1]]]
}

/// `n_instances × L` single-qubit unitaries; entry `(i, k)` is drawn from
/// stream `(seed, i, k)`, so any instance can be regenerated alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomUnitaryBatch {
    pub seed: u64,
    pub unitaries: Vec<Vec<Matrix2>>,
}

impl RandomUnitaryBatch {
    pub fn sample(n_instances: usize, n_qubits: usize, seed: u64) -> RandomUnitaryBatch {
        let unitaries = (0..n_instances)
            .map(|i| {
                (0..n_qubits)
                    .map(|k| sample_cue_unitary(&mut stream(seed, &[i as u64, k as u64])))
                    .collect()
            })
            .collect();
        RandomUnitaryBatch { seed, unitaries }
    }

    pub fn n_instances(&self) -> usize {
        self.unitaries.len()
    }
}

/// One circuit per instance: `base`, then a layer of the instance's
/// unitaries on `subsystem`, measuring only `subsystem`.
pub fn build_rm_circuits(base: &Circuit, subsystem: &[usize], batch: &RandomUnitaryBatch) -> Result<Vec<Circuit>> {
    if subsystem.is_empty() {
        return Err(Error::EmptyMeasurement);
    }
    batch
        .unitaries
        .iter()
        .map(|inst| {
            if inst.len() != subsystem.len() {
                return Err(Error::LengthMismatch(inst.len(), subsystem.len()));
            }
            let mut c = base.clone();
            let gates = subsystem
                .iter()
                .zip(inst)
                .map(|(&q, u)| Gate::unitary(q, *u))
                .collect::<Result<Vec<_>>>()?;
            c.push_layer(Layer::new(gates, 1.0))?;
            c.set_measured(subsystem.to_vec())?;
            Ok(c)
        })
        .collect()
}
