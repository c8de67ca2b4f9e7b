//! Néel quench on 10 sites: exact Krylov evolution against first- and
//! second-order Trotter circuits, with the state infidelity of each.
//!
//! ```text
//! cargo run --release --example exact_dynamics
//! ```

use spinquench::model::{build_trotter_circuit, exact_evolve, neel_state, Boundary, TrotterOrder, XXZParams};
use spinquench::observables::staggered_magnetization_exact;
use spinquench::sim::{apply_circuit, phase_distance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 10;
    let params = XXZParams::new(n, 1.0, 0.5, 1, Boundary::Open);
    let neel = neel_state(n)?;
    println!("{:>4} {:>10} {:>10} {:>10} {:>9} {:>9}", "t", "exact", "second", "first", "d2", "d1");
    for m in 1..=10 {
        let p = params.with_steps(m);
        let t = m as f64 * p.dt;
        let exact = exact_evolve(&p, &neel, t)?;
        let second = apply_circuit(neel.clone(), &build_trotter_circuit(&p, TrotterOrder::SecondOptimized)?)?;
        let first = apply_circuit(neel.clone(), &build_trotter_circuit(&p, TrotterOrder::First)?)?;
        println!(
            "{t:>4.1} {:>10.5} {:>10.5} {:>10.5} {:>9.2e} {:>9.2e}",
            staggered_magnetization_exact(&exact),
            staggered_magnetization_exact(&second),
            staggered_magnetization_exact(&first),
            phase_distance(&second, &exact),
            phase_distance(&first, &exact),
        );
    }
    Ok(())
}
