//! Exact statevector simulation and the value types shared by every other
//! module.

mod circuit;
mod counts;
mod density;
mod gate;
pub mod rng;
mod state;

pub use circuit::{BlockRecord, Circuit, IdleWindow, Layer, Pulse};
pub use counts::{CountsHistogram, Distribution};
pub use density::{exact_purity, reduced_density_matrix, DensityMatrix};
pub use gate::{matrix2_is_unitary, Gate, GateKind, Matrix2, Pauli, Qubits};
pub use state::{apply_circuit, apply_gate, sample_counts, StateVector};
pub(crate) use state::{cumulative, draw_index, gather_bits, sample_from_cdf};

use num_complex::Complex64;

pub(crate) const C0: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Global-phase-insensitive distance `min_φ ‖a − e^{iφ} b‖`, equal to
/// `√(2 − 2|⟨a|b⟩|)` for normalized states. Evaluated at the optimal phase
/// rather than through the overlap, which loses half the digits.
pub fn phase_distance(a: &StateVector, b: &StateVector) -> f64 {
    let overlap = a.inner(b);
    let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { C1 };
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y * phase).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
