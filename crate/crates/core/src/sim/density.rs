use num_complex::Complex64;

use super::state::{gather_bits, StateVector};
use super::C0;
use crate::{Error, Result};

/// Row-major `dim × dim` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<DensityMatrix> {
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch(entries.len(), dim * dim));
        }
        Ok(DensityMatrix { dim, entries })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> DensityMatrix {
        let a = state.amplitudes();
        let dim = a.len();
        let mut entries = vec![C0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = a[i] * a[j].conj();
            }
        }
        DensityMatrix { dim, entries }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> DensityMatrix {
        let mut entries = vec![C0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Partial trace of `|ψ⟩⟨ψ|` over the complement of `subsystem`. Bit `k` of
/// the reduced basis index is `subsystem[k]`.
pub fn reduced_density_matrix(state: &StateVector, subsystem: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    if subsystem.is_empty() {
        return Err(Error::EmptyMeasurement);
    }
    let mut seen = vec![false; n];
    for &q in subsystem {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    let env: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let dim = 1usize << subsystem.len();
    let env_dim = 1usize << env.len();
    // M[sub][env] = ψ(sub, env); ρ = M M†
    let mut m = vec![C0; dim * env_dim];
    for (i, a) in state.amplitudes().iter().enumerate() {
        m[gather_bits(i, subsystem) * env_dim + gather_bits(i, &env)] = *a;
    }
    let mut entries = vec![C0; dim * dim];
    for i in 0..dim {
        let ri = &m[i * env_dim..(i + 1) * env_dim];
        for j in i..dim {
            let rj = &m[j * env_dim..(j + 1) * env_dim];
            let v: Complex64 = ri.iter().zip(rj).map(|(x, y)| x * y.conj()).sum();
            entries[i * dim + j] = v;
            entries[j * dim + i] = v.conj();
        }
    }
    Ok(DensityMatrix { dim, entries })
}

/// `Tr(ρ²)`, computed as the squared Frobenius norm of a Hermitian `ρ`.
pub fn exact_purity(rho: &DensityMatrix) -> f64 {
    rho.entries.iter().map(|e| e.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{apply_gate, Gate};

    fn bell() -> StateVector {
        let s = apply_gate(StateVector::zero(2), &Gate::h(0)).unwrap();
        apply_gate(s, &Gate::cx(0, 1)).unwrap()
    }

    #[test]
    fn product_state_reduces_to_pure_qubit() {
        // |01⟩ with qubit 0 = 1
        let rho = reduced_density_matrix(&StateVector::basis(2, 0b01), &[0]).unwrap();
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);
        assert!((exact_purity(&rho) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_state_half_is_maximally_mixed() {
        let rho = reduced_density_matrix(&bell(), &[0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        for (a, b) in rho.entries().iter().zip(mixed.entries()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((exact_purity(&rho) - 0.5).abs() < 1e-12);
        assert!(rho.hermiticity_error() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purity_of_mixed_states() {
        assert!((exact_purity(&DensityMatrix::maximally_mixed(2)) - 0.5).abs() < 1e-15);
        for l in 1..5 {
            let d = DensityMatrix::maximally_mixed(1 << l);
            assert!((exact_purity(&d) - 2f64.powi(-l)).abs() < 1e-15);
        }
        assert!((exact_purity(&DensityMatrix::pure(&bell())) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_and_duplicate_subsystems() {
        let s = StateVector::zero(3);
        assert_eq!(reduced_density_matrix(&s, &[]), Err(Error::EmptyMeasurement));
        assert_eq!(reduced_density_matrix(&s, &[1, 1]), Err(Error::DuplicateQubit(1)));
        // the full register is allowed
        let full = reduced_density_matrix(&s, &[0, 1, 2]).unwrap();
        assert!((exact_purity(&full) - 1.0).abs() < 1e-15);
    }
}
