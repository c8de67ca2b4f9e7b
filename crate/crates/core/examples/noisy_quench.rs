//! Runs the N=6 quench on the default device noise model without mitigation
//! and shows the damping of the staggered magnetization, plus a single
//! trajectory's inserted errors.
//!
//! ```text
//! cargo run --release --example noisy_quench
//! ```

use spinquench::model::{build_trotter_circuit, neel_state, Boundary, TrotterOrder, XXZParams};
use spinquench::noise::{noisy_execute_detailed, NoiseModel};
use spinquench::observables::{staggered_magnetization_counts, staggered_magnetization_exact};
use spinquench::sim::apply_circuit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let noise = NoiseModel::default_device();
    println!("noise: {}", noise.to_key_values().replace('\n', " "));
    let neel = neel_state(n)?;
    println!("{:>4} {:>10} {:>10} {:>8}", "M", "noiseless", "noisy", "σ");
    for m in 1..=10 {
        let p = XXZParams::new(n, 1.0, 0.5, m, Boundary::Open);
        let c = build_trotter_circuit(&p, TrotterOrder::SecondOptimized)?;
        let ideal = staggered_magnetization_exact(&apply_circuit(neel.clone(), &c)?);
        let run = noisy_execute_detailed(&c, &neel, &noise, 20_000, 100, m as u64)?;
        let (value, se) = staggered_magnetization_counts(&run.counts, n)?;
        println!("{m:>4} {ideal:>10.5} {value:>10.5} {se:>8.5}");
        if m == 10 {
            let t = &run.trajectories[0];
            println!("trajectory 0 of M=10 drew {} Pauli errors:", t.inserted_errors.len());
            for e in t.inserted_errors.iter().take(5) {
                println!("  layer {:>3} qubits {:?} {}", e.layer, e.qubits, e.label);
            }
        }
    }
    Ok(())
}
