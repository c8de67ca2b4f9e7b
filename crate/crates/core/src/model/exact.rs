//! `e^{-iHt}|ψ⟩` for the XXZ Hamiltonian by Lanczos (Krylov) propagation.
//!
//! The Hamiltonian is applied matrix-free in the computational basis:
//! `XX + YY` swaps anti-aligned neighbours with weight 2 and `ZZ` is ±1 on
//! the diagonal.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::params::XXZParams;
use crate::sim::{StateVector, C0};
use crate::{Error, Result};

/// Largest chain accepted by [`exact_evolve`].
pub const EXACT_ORACLE_MAX_QUBITS: usize = 14;

/// `H = (J1/4) Σ_bonds (XX + YY + Δ ZZ)`.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n_qubits: usize,
    j1: f64,
    delta: f64,
    bonds: Vec<(usize, usize)>,
}

impl Hamiltonian {
    pub fn xxz(params: &XXZParams) -> Result<Hamiltonian> {
        params.validate()?;
        Ok(Hamiltonian {
            n_qubits: params.n_qubits,
            j1: params.j1,
            delta: params.delta,
            bonds: params.bonds(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `out = H · v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let q = self.j1 / 4.0;
        let masks: Vec<(usize, usize)> = self.bonds.iter().map(|&(a, b)| (1 << a, 1 << b)).collect();
        for (i, o) in out.iter_mut().enumerate() {
            let mut diag = 0.0;
            let mut acc = C0;
            for &(ma, mb) in &masks {
                let aligned = ((i & ma) == 0) == ((i & mb) == 0);
                if aligned {
                    diag += self.delta;
                } else {
                    diag -= self.delta;
                    acc += v[i ^ ma ^ mb] * 2.0;
                }
            }
            *o = (acc + v[i] * diag) * q;
        }
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn energy(&self, state: &StateVector) -> f64 {
        let mut hv = vec![C0; state.amplitudes().len()];
        self.apply(state.amplitudes(), &mut hv);
        state.amplitudes().iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Dense real symmetric matrix (tests and small-N diagnostics only).
    pub fn dense(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        let mut e = vec![C0; dim];
        let mut col = vec![C0; dim];
        for j in 0..dim {
            e[j] = Complex64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for i in 0..dim {
                m[(i, j)] = col[i].re;
            }
            e[j] = C0;
        }
        m
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Adaptive-step Lanczos propagator with full reorthogonalisation.
#[derive(Debug, Clone)]
pub struct KrylovPropagator {
    pub max_dim: usize,
    pub tolerance: f64,
}

impl Default for KrylovPropagator {
    fn default() -> Self {
        KrylovPropagator { max_dim: 40, tolerance: 1e-12 }
    }
}

impl KrylovPropagator {
    /// Propagates `state` by `e^{-iHt}`; the accumulated a-posteriori error
    /// estimate is kept below `tolerance · max(1, |t|)`.
    pub fn evolve(&self, h: &Hamiltonian, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.n_qubits() != h.n_qubits {
            return Err(Error::QubitCountMismatch { expected: h.n_qubits, got: state.n_qubits() });
        }
        let mut v = state.amplitudes().to_vec();
        if t == 0.0 {
            return StateVector::from_amplitudes(v);
        }
        let total = t.abs();
        let sign = t.signum();
        let mut done = 0.0;
        let mut step = total;
        let budget = self.tolerance * total.max(1.0);
        while done < total * (1.0 - 1e-15) {
            let tau = step.min(total - done);
            let basis = self.lanczos(h, &v)?;
            let (next, err) = basis.propagate(sign * tau);
            if err <= budget * tau / total || tau < 1e-9 {
                v = next;
                done += tau;
                // grow again after an accepted step
                step = (tau * 1.5).min(total);
            } else {
                step = tau / 2.0;
            }
        }
        StateVector::from_amplitudes(v)
    }

    fn lanczos(&self, h: &Hamiltonian, v: &[Complex64]) -> Result<KrylovBasis> {
        let beta0 = norm(v);
        let mut vectors: Vec<Vec<Complex64>> = vec![v.iter().map(|x| x / beta0).collect()];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        let mut w = vec![C0; v.len()];
        let mut residual = 0.0;
        for j in 0..self.max_dim {
            h.apply(&vectors[j], &mut w);
            let a = dot(&vectors[j], &w).re;
            alpha.push(a);
            // full reorthogonalisation, twice
            for _ in 0..2 {
                for q in &vectors {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let b = norm(&w);
            residual = b;
            if b < 1e-13 || j + 1 == self.max_dim {
                break;
            }
            beta.push(b);
            vectors.push(w.iter().map(|x| x / b).collect());
        }
        Ok(KrylovBasis { beta0, vectors, alpha, beta, residual })
    }
}

struct KrylovBasis {
    beta0: f64,
    vectors: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    residual: f64,
}

impl KrylovBasis {
    /// `β₀ V exp(-i T τ) e₁` and the error estimate `β₀ β_m |[exp(-iTτ)e₁]_m|`.
    fn propagate(&self, tau: f64) -> (Vec<Complex64>, f64) {
        let m = self.alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = self.alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = self.beta[i];
                t[(i + 1, i)] = self.beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        // y = Q exp(-i Λ τ) Qᵀ e₁
        let y: Vec<Complex64> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| {
                        let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k] * tau);
                        phase * eig.eigenvectors[(i, k)] * eig.eigenvectors[(0, k)]
                    })
                    .sum()
            })
            .collect();
        let dim = self.vectors[0].len();
        let mut out = vec![C0; dim];
        for (q, yi) in self.vectors.iter().zip(&y) {
            let c = yi * self.beta0;
            for (o, qi) in out.iter_mut().zip(q) {
                *o += c * qi;
            }
        }
        let err = self.beta0 * self.residual * y[m - 1].norm();
        (out, err)
    }
}

/// Exact `e^{-iHt}|ψ⟩` for chains up to [`EXACT_ORACLE_MAX_QUBITS`] sites.
pub fn exact_evolve(params: &XXZParams, initial: &StateVector, t: f64) -> Result<StateVector> {
    if params.n_qubits > EXACT_ORACLE_MAX_QUBITS {
        return Err(Error::TooLarge { n: params.n_qubits, limit: EXACT_ORACLE_MAX_QUBITS });
    }
    let h = Hamiltonian::xxz(params)?;
    KrylovPropagator::default().evolve(&h, initial, t)
}
