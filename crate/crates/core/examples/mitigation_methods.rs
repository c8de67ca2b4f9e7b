//! The mitigation primitives one at a time on a 6-qubit, 4-step quench:
//! readout twirling, dynamical decoupling, Pauli twirling, zero-noise
//! extrapolation and self-mitigation.
//!
//! ```text
//! cargo run --release --example mitigation_methods
//! ```

use spinquench::mitigation::{
    dd_insert, pauli_twirl, sm_mitigate_with_errors, trex_collapse, trex_expand, zne_extrapolate, zne_fold, DdSpec,
    ZneFit, ZnePoint,
};
use spinquench::model::{build_sm_test_circuit, build_trotter_circuit, neel_state, Boundary, TrotterOrder, XXZParams};
use spinquench::noise::{noisy_execute, NoiseModel, Readout, ReadoutError};
use spinquench::observables::{staggered_magnetization_counts, staggered_magnetization_exact};
use spinquench::sim::rng::derive_seed;
use spinquench::sim::{apply_circuit, Circuit, CountsHistogram, StateVector};

const N: usize = 6;
const SHOTS: u64 = 40_000;

fn measure(c: &Circuit, init: &StateVector, noise: &NoiseModel, seed: u64) -> spinquench::Result<(f64, f64)> {
    staggered_magnetization_counts(&noisy_execute(c, init, noise, SHOTS, 200, seed)?, N)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = XXZParams::new(N, 1.0, 0.5, 4, Boundary::Open);
    let target = build_trotter_circuit(&p, TrotterOrder::SecondOptimized)?;
    let neel = neel_state(N)?;
    let ideal = staggered_magnetization_exact(&apply_circuit(neel.clone(), &target)?);
    println!("noiseless value {ideal:.5}");

    // readout only
    let readout = NoiseModel { readout: Readout::Uniform(ReadoutError::new(0.05, 0.01)?), ..NoiseModel::ideal() };
    let raw = measure(&target, &neel, &readout, 1)?;
    let jobs = trex_expand(&target, 20, 2)?;
    let mut results = Vec::new();
    for (k, (c, mask)) in jobs.iter().enumerate() {
        results.push((noisy_execute(c, &neel, &readout, SHOTS / 20, 1, derive_seed(3, &[k as u64]))?, *mask));
    }
    let collapsed: CountsHistogram = trex_collapse(&results)?;
    let trex = staggered_magnetization_counts(&collapsed, N)?;
    println!("TREX  raw {:.5}  twirled {:.5}", raw.0, trex.0);

    // idle dephasing only
    let idle = NoiseModel { idle_z: 0.2, ..NoiseModel::ideal() };
    let dd = dd_insert(&target, &DdSpec::default())?;
    println!(
        "DD    bare {:.5}  decoupled {:.5}  ({} windows)",
        measure(&target, &neel, &idle, 4)?.0,
        measure(&dd, &neel, &idle, 4)?.0,
        dd.meta.get("dd_windows").map(String::as_str).unwrap_or("0")
    );

    // coherent ZZ over-rotation only
    let coherent = NoiseModel { eps2: 0.05, ..NoiseModel::ideal() };
    let copies = pauli_twirl(&target, 20, 5)?;
    let mut twirled = 0.0;
    for (k, c) in copies.iter().enumerate() {
        twirled += measure(c, &neel, &coherent, derive_seed(6, &[k as u64]))?.0 / copies.len() as f64;
    }
    println!("PT    bare {:.5}  twirled {:.5}", measure(&target, &neel, &coherent, 7)?.0, twirled);

    // depolarizing only
    let depol = NoiseModel::depolarizing(0.01);
    let mut points = Vec::new();
    for f in [1, 3, 5] {
        let (value, std_error) = measure(&zne_fold(&target, f)?, &neel, &depol, 8 + f as u64)?;
        points.push(ZnePoint { factor: f as f64, value, std_error });
    }
    let zne = zne_extrapolate(&points, ZneFit::Linear)?;
    println!("ZNE   folds {:?}  extrapolated {:.5} ± {:.5}", points.iter().map(|p| p.value).collect::<Vec<_>>(), zne.mitigated, zne.std_error);

    let test = build_sm_test_circuit(&p)?;
    let test_ideal = staggered_magnetization_exact(&apply_circuit(neel.clone(), &test)?);
    let sm = sm_mitigate_with_errors((points[0].value, points[0].std_error), measure(&test, &neel, &depol, 20)?, test_ideal);
    println!("SM    p = {:.4}  rescaled {:.5} ± {:.5}", sm.breakdown.sm_p.unwrap_or(f64::NAN), sm.mitigated, sm.std_error);
    Ok(())
}
