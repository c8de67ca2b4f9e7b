//! Quench dynamics of the XXZ Heisenberg chain on a simulated noisy quantum
//! computer.
//!
//! The crate is organised bottom-up:
//!
//! - [`sim`]: dense statevector simulator, circuits, counts, density matrices.
//! - [`model`]: XXZ parameters, Néel state, brick-wall Trotter circuits
//!   (first order and the optimized second order) and an exact Krylov oracle.
//! - [`noise`]: Monte Carlo Pauli trajectories, coherent and idle errors,
//!   readout confusion.
//! - [`mitigation`]: TREX, dynamical decoupling, Pauli twirling, zero-noise
//!   extrapolation and self-mitigation, plus the per-step pipeline.
//! - [`observables`]: staggered magnetization and error metrics.
//! - [`entropy`]: randomized-measurement Rényi-2 entropy.
//! - [`qmp`]: two-circuit multi-programming with a spacer qubit.
//! - [`runner`]: configuration files, workloads, fixtures and result files.
//!
//! Qubit 0 is the least significant bit of every basis index and the
//! rightmost character of every rendered bitstring.

pub mod entropy;
pub mod error;
pub mod mitigation;
pub mod model;
pub mod noise;
pub mod observables;
pub mod qmp;
pub mod runner;
pub mod sim;

pub use error::{Error, Result};
