//! Regenerates the bundled noiseless N=20 reference series: the staggered
//! magnetization of the Néel quench after `M = 1..10` optimized second-order
//! Trotter steps (Δ = 1, δt = 0.5), computed on the full statevector.
//!
//! ```text
//! cargo run --release --example regenerate_reference -- crates/core/fixtures/reference_n20.csv
//! ```
//!
//! Pass `--exact` to also print the exact (Krylov) series next to it.

use std::time::Instant;

use spinquench::model::{build_trotter_circuit, neel_state, Boundary, Hamiltonian, KrylovPropagator, TrotterOrder, XXZParams};
use spinquench::observables::staggered_magnetization_exact;
use spinquench::runner::{FixturePoint, FixtureTable};
use spinquench::sim::apply_circuit;

const N: usize = 20;
const STEPS: usize = 10;
const DT: f64 = 0.5;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let exact = args.iter().any(|a| a == "--exact");
    let out = args.iter().find(|a| !a.starts_with("--")).cloned();

    let mut table = FixtureTable::new("reference_n20");
    table.comments = vec![
        "Noiseless staggered magnetization, N=20, delta=1, dt=0.5, Neel initial state.".into(),
        "Generated by the statevector simulation of the optimized second-order Trotter circuit".into(),
        "(examples/regenerate_reference.rs); not measured data.".into(),
    ];
    let neel = neel_state(N)?;
    for boundary in [Boundary::Open, Boundary::Periodic] {
        let label = match boundary {
            Boundary::Open => "OBC",
            Boundary::Periodic => "PBC",
        };
        let t0 = Instant::now();
        let mut points = Vec::new();
        for m in 1..=STEPS {
            let params = XXZParams::new(N, 1.0, DT, m, boundary);
            let state = apply_circuit(neel.clone(), &build_trotter_circuit(&params, TrotterOrder::SecondOptimized)?)?;
            let value = staggered_magnetization_exact(&state);
            points.push(FixturePoint { step: m, value, std_dev: 0.0 });
            eprintln!("{label} step {m:2}: {value:+.6}");
        }
        eprintln!("{label}: {:.1} s", t0.elapsed().as_secs_f64());
        table.series.insert(label.to_string(), points);

        if exact {
            let params = XXZParams::new(N, 1.0, DT, STEPS, boundary);
            let h = Hamiltonian::xxz(&params)?;
            let krylov = KrylovPropagator::default();
            let mut state = neel.clone();
            for m in 1..=STEPS {
                state = krylov.evolve(&h, &state, DT)?;
                eprintln!("{label} exact t={:.1}: {:+.6}", m as f64 * DT, staggered_magnetization_exact(&state));
            }
        }
    }
    let text = table.to_csv();
    match out {
        Some(path) => std::fs::write(&path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
