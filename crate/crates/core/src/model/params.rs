use std::fmt;
use std::str::FromStr;

use crate::sim::StateVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "OBC",
            Boundary::Periodic => "PBC",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Boundary> {
        match s.to_ascii_uppercase().as_str() {
            "OBC" | "OPEN" => Ok(Boundary::Open),
            "PBC" | "PERIODIC" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidParameter(format!("unknown boundary `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrotterOrder {
    /// `(A B)^M`: `2M` brick layers.
    First,
    /// `A/2 B A B … A B A/2`: `2M + 1` brick layers.
    SecondOptimized,
}

impl FromStr for TrotterOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<TrotterOrder> {
        match s.to_ascii_lowercase().as_str() {
            "first" | "1" => Ok(TrotterOrder::First),
            "second" | "second_optimized" | "2" => Ok(TrotterOrder::SecondOptimized),
            other => Err(Error::InvalidParameter(format!("unknown Trotter order `{other}`"))),
        }
    }
}

/// Chain and discretisation parameters. Units: `ħ = 1`, energies in units
/// of `J1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XXZParams {
    pub n_qubits: usize,
    pub j1: f64,
    pub delta: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub boundary: Boundary,
}

impl XXZParams {
    pub fn new(n_qubits: usize, delta: f64, dt: f64, n_steps: usize, boundary: Boundary) -> XXZParams {
        XXZParams { n_qubits, j1: 1.0, delta, dt, n_steps, boundary }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::InvalidParameter("chain needs at least 2 sites".into()));
        }
        if !(self.j1 > 0.0) {
            return Err(Error::InvalidParameter("J1 must be positive".into()));
        }
        if !(self.dt.abs() > 0.0) || !self.dt.is_finite() || !self.delta.is_finite() {
            return Err(Error::InvalidParameter("time step must be finite and non-zero".into()));
        }
        if self.n_steps < 1 {
            return Err(Error::InvalidParameter("at least one Trotter step".into()));
        }
        if self.boundary == Boundary::Periodic && (self.n_qubits < 3 || !self.n_qubits.is_multiple_of(2)) {
            return Err(Error::InvalidParameter(format!(
                "periodic chain needs an even length ≥ 4, got {}",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// `(θx, θy, θz) = (J1/2·δt, J1/2·δt, J1/2·Δ·δt)`.
    pub fn theta(&self) -> [f64; 3] {
        let h = 0.5 * self.j1 * self.dt;
        [h, h, h * self.delta]
    }

    /// Same parameters with a different step count.
    pub fn with_steps(&self, n_steps: usize) -> XXZParams {
        XXZParams { n_steps, ..*self }
    }

    pub fn with_dt(&self, dt: f64) -> XXZParams {
        XXZParams { dt, ..*self }
    }

    /// Bonds `(j, j+1)` starting at even `j` (first brick layer).
    pub fn odd_bonds(&self) -> Vec<(usize, usize)> {
        (0..self.n_qubits - 1).step_by(2).map(|j| (j, j + 1)).collect()
    }

    /// Bonds starting at odd `j`, plus the wrap bond `(N−1, 0)` when
    /// periodic.
    pub fn even_bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<_> = (1..self.n_qubits - 1).step_by(2).map(|j| (j, j + 1)).collect();
        if self.boundary == Boundary::Periodic {
            b.push((self.n_qubits - 1, 0));
        }
        b
    }

    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut b = self.odd_bonds();
        b.extend(self.even_bonds());
        b
    }
}

/// `|↑↓↑↓…⟩`: site `i = j + 1` lives on qubit `j`; spin-up is bit 0, so the
/// odd qubits carry a 1.
pub fn neel_state(n: usize) -> Result<StateVector> {
    if n < 1 {
        return Err(Error::InvalidParameter("Néel state needs at least one site".into()));
    }
    if n > 30 {
        return Err(Error::TooLarge { n, limit: 30 });
    }
    let index = (1..n).step_by(2).fold(0usize, |acc, j| acc | (1 << j));
    Ok(StateVector::basis(n, index))
}
