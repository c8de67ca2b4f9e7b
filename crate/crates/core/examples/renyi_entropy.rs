//! Rényi-2 entanglement growth after the Néel quench, from randomized
//! single-qubit measurements on half of an 8-qubit chain, against the exact
//! reduced density matrix.
//!
//! ```text
//! cargo run --release --example renyi_entropy
//! ```

use spinquench::entropy::{estimate_renyi2, RmOptions};
use spinquench::model::{build_trotter_circuit, neel_state, Boundary, TrotterOrder, XXZParams};
use spinquench::sim::{apply_circuit, exact_purity, reduced_density_matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 8;
    let subsystem = [0, 1, 2, 3];
    let neel = neel_state(n)?;
    let opts = RmOptions { n_instances: 60, shots: Some(20_000), seed: 1, ..RmOptions::default() };
    println!("{:>4} {:>9} {:>9} {:>9}", "t", "S2 (RM)", "σ", "S2 exact");
    for m in (0..=10).step_by(2) {
        let p = XXZParams::new(n, 1.0, 0.5, m.max(1), Boundary::Open);
        let c = if m == 0 { spinquench::sim::Circuit::new(n) } else { build_trotter_circuit(&p, TrotterOrder::SecondOptimized)? };
        let state = apply_circuit(neel.clone(), &c)?;
        let exact = -exact_purity(&reduced_density_matrix(&state, &subsystem)?).ln();
        let est = estimate_renyi2(&c, &neel, &subsystem, &opts)?;
        println!("{:>4.1} {:>9.4} {:>9.4} {:>9.4}", m as f64 * 0.5, est.renyi2, est.std_error, exact);
        for flag in &est.flags {
            println!("     flag: {flag}");
        }
    }
    Ok(())
}
