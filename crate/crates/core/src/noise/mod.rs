//! Noise model and Monte Carlo trajectory execution.
//!
//! Four error sources, each aimed at one mitigation method:
//!
//! - stochastic two-qubit Pauli errors after every CX/CZ (depolarizing, SM),
//! - a coherent `Rzz(ε₂)` after every CX/CZ (Pauli twirling),
//! - a static `Rz(ω·τ)` on every qubit idling for time `τ` (DD),
//! - per-qubit readout confusion (TREX).

mod trajectory;

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sim::CountsHistogram;
use crate::{Error, Result};

pub use trajectory::{
    noisy_execute, noisy_execute_detailed, replay_trajectory, InsertedError, NoisyRun, Trajectory,
};

/// Readout confusion of one qubit: `P(read 1 | 0)` and `P(read 0 | 1)`.
/// The columns of the implied 2×2 matrix sum to 1 by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReadoutError {
    pub p1_given_0: f64,
    pub p0_given_1: f64,
}

impl ReadoutError {
    pub const IDEAL: ReadoutError = ReadoutError { p1_given_0: 0.0, p0_given_1: 0.0 };

    pub fn new(p1_given_0: f64, p0_given_1: f64) -> Result<ReadoutError> {
        let r = ReadoutError { p1_given_0, p0_given_1 };
        r.validate()?;
        Ok(r)
    }

    pub fn symmetric(q: f64) -> Result<ReadoutError> {
        ReadoutError::new(q, q)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("readout P(1|0)", self.p1_given_0)?;
        check_probability("readout P(0|1)", self.p0_given_1)
    }

    /// Column-stochastic matrix `[[P(0|0), P(0|1)], [P(1|0), P(1|1)]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [1.0 - self.p1_given_0, self.p0_given_1],
            [self.p1_given_0, 1.0 - self.p0_given_1],
        ]
    }

    pub fn is_ideal(&self) -> bool {
        self.p1_given_0 == 0.0 && self.p0_given_1 == 0.0
    }

    fn flip_probability(&self, bit: u64) -> f64 {
        if bit == 0 {
            self.p1_given_0
        } else {
            self.p0_given_1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum Readout {
    #[default]
    Ideal,
    Uniform(ReadoutError),
    /// Indexed by physical qubit; missing entries are ideal.
    PerQubit(Vec<ReadoutError>),
}

impl Readout {
    pub fn for_qubit(&self, q: usize) -> ReadoutError {
        match self {
            Readout::Ideal => ReadoutError::IDEAL,
            Readout::Uniform(r) => *r,
            Readout::PerQubit(v) => v.get(q).copied().unwrap_or(ReadoutError::IDEAL),
        }
    }

    pub fn is_ideal(&self) -> bool {
        match self {
            Readout::Ideal => true,
            Readout::Uniform(r) => r.is_ideal(),
            Readout::PerQubit(v) => v.iter().all(ReadoutError::is_ideal),
        }
    }
}

/// Noise parameters. Idle rates are in radians per unit of layer duration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Probability of a uniformly random non-identity two-qubit Pauli after
    /// each CX/CZ.
    pub p2: f64,
    /// Residual `Rzz(ε₂)` angle after each CX/CZ.
    pub eps2: f64,
    pub idle_z: f64,
    pub readout: Readout,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

impl NoiseModel {
    pub fn ideal() -> NoiseModel {
        NoiseModel::default()
    }

    /// The default desk-scale device model. These magnitudes are invented;
    /// the hardware values are not expected.
    pub fn default_device() -> NoiseModel {
        NoiseModel {
            p2: 0.005,
            eps2: 0.04,
            idle_z: 0.03,
            readout: Readout::Uniform(ReadoutError { p1_given_0: 0.02, p0_given_1: 0.05 }),
        }
    }

    pub fn depolarizing(p2: f64) -> NoiseModel {
        NoiseModel { p2, ..NoiseModel::default() }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p2", self.p2)?;
        if !self.eps2.is_finite() || !self.idle_z.is_finite() {
            return Err(Error::InvalidParameter("noise angles must be finite".into()));
        }
        match &self.readout {
            Readout::Ideal => Ok(()),
            Readout::Uniform(r) => r.validate(),
            Readout::PerQubit(v) => v.iter().try_for_each(ReadoutError::validate),
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.p2 == 0.0 && self.eps2 == 0.0 && self.idle_z == 0.0 && self.readout.is_ideal()
    }

    /// Confusion entries for the measured bits, in measurement order.
    pub fn readout_for(&self, measured: &[usize]) -> Vec<ReadoutError> {
        measured.iter().map(|&q| self.readout.for_qubit(q)).collect()
    }

    /// Sets one `key = value` entry: `p2`, `eps2`, `idle_z`,
    /// `readout = <P(1|0)>,<P(0|1)>` or `readout.q<k> = <P(1|0)>,<P(0|1)>`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("`{key}`: `{v}` is not a number")))
        };
        let pair = |v: &str| -> Result<ReadoutError> {
            let parts: Vec<&str> = v.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::InvalidParameter(format!("`{key}` expects `P(1|0),P(0|1)`")));
            }
            ReadoutError::new(num(parts[0])?, num(parts[1])?)
        };
        match key {
            "p2" => self.p2 = num(value)?,
            "eps2" => self.eps2 = num(value)?,
            "idle_z" => self.idle_z = num(value)?,
            "readout" => self.readout = Readout::Uniform(pair(value)?),
            k => {
                let q: usize = k
                    .strip_prefix("readout.q")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown noise key `{k}`")))?;
                let r = pair(value)?;
                let mut v = match std::mem::take(&mut self.readout) {
                    Readout::PerQubit(v) => v,
                    Readout::Uniform(u) => vec![u; q + 1],
                    Readout::Ideal => Vec::new(),
                };
                if v.len() <= q {
                    v.resize(q + 1, ReadoutError::IDEAL);
                }
                v[q] = r;
                self.readout = Readout::PerQubit(v);
            }
        }
        self.validate()
    }

    /// Inverse of [`NoiseModel::set`], one entry per line.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p2 = {}", self.p2);
        let _ = writeln!(s, "eps2 = {}", self.eps2);
        let _ = writeln!(s, "idle_z = {}", self.idle_z);
        match &self.readout {
            Readout::Ideal => {}
            Readout::Uniform(r) => {
                let _ = writeln!(s, "readout = {},{}", r.p1_given_0, r.p0_given_1);
            }
            Readout::PerQubit(v) => {
                for (q, r) in v.iter().enumerate() {
                    let _ = writeln!(s, "readout.q{q} = {},{}", r.p1_given_0, r.p0_given_1);
                }
            }
        }
        s
    }
}

/// Flips the `k`-th bit of an outcome with the probability given by
/// `readout[k]`.
pub(crate) fn confuse_outcome<R: Rng>(outcome: u64, readout: &[ReadoutError], rng: &mut R) -> u64 {
    let mut out = outcome;
    for (k, r) in readout.iter().enumerate() {
        let bit = (outcome >> k) & 1;
        let p = r.flip_probability(bit);
        if p > 0.0 && rng.random::<f64>() < p {
            out ^= 1 << k;
        }
    }
    out
}

/// Passes every shot of `counts` through the per-bit confusion channel.
pub fn apply_readout_confusion(
    counts: &CountsHistogram,
    readout: &[ReadoutError],
    seed: u64,
) -> Result<CountsHistogram> {
    if readout.len() != counts.width() {
        return Err(Error::WidthMismatch { expected: counts.width(), got: readout.len() });
    }
    readout.iter().try_for_each(ReadoutError::validate)?;
    let mut rng = crate::sim::rng::stream(seed, &[]);
    let mut out = CountsHistogram::new(counts.width());
    for (k, n) in counts.iter() {
        for _ in 0..n {
            out.add(confuse_outcome(k, readout, &mut rng), 1);
        }
    }
    Ok(out)
}

/// `(1 − p)·ideal`, the expectation of a traceless observable under global
/// depolarizing noise of strength `p`.
pub fn global_depolarizing_reference(p: f64, ideal_expectation: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("depolarizing factor {p} outside [0, 1)")));
    }
    Ok((1.0 - p) * ideal_expectation)
}
