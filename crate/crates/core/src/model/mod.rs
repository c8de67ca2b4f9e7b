//! XXZ chain parameters, Trotter circuit construction and the exact
//! evolution oracle.

mod exact;
mod params;
mod trotter;

pub use exact::{exact_evolve, Hamiltonian, KrylovPropagator, EXACT_ORACLE_MAX_QUBITS};
pub use params::{neel_state, Boundary, TrotterOrder, XXZParams};
pub use trotter::{
    block_gates, build_layered, build_sm_test_circuit, build_trotter_circuit, cx_count_closed_form,
    sm_step_signs, unit_block,
};
