//! Mean absolute error of the four mitigation configurations on the default
//! device noise model, averaged over repetitions.
//!
//! ```text
//! cargo run --release --example method_ordering -- [n_qubits] [repetitions]
//! ```

use std::time::Instant;

use spinquench::mitigation::{run_mitigated_experiment, MitigationConfig};
use spinquench::model::{Boundary, XXZParams};
use spinquench::noise::NoiseModel;
use spinquench::observables::ObservableSpec;
use spinquench::sim::rng::derive_seed;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map(|s| s.parse()).transpose()?.unwrap_or(6);
    let reps: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    let params = XXZParams::new(n, 1.0, 0.5, 10, Boundary::Open);
    let noise = NoiseModel::default_device();
    let obs = ObservableSpec::staggered(n);

    for name in ["NOQEM", "TREX+DD+PT", "TREX+DD+PT+ZNE", "TREX+DD+PT+SM"] {
        let config = MitigationConfig::preset(name)?;
        let t0 = Instant::now();
        let mut total = 0.0;
        for r in 0..reps {
            let reports = run_mitigated_experiment(&params, &noise, &config, &obs, 100_000, derive_seed(7, &[r]))?;
            let errs: Vec<f64> = reports.iter().map(|s| (s.mitigated - s.reference.unwrap()).abs()).collect();
            total += errs.iter().sum::<f64>() / errs.len() as f64;
        }
        println!("{name:<16} MAE {:.5}  ({:.1?})", total / reps as f64, t0.elapsed());
    }
    Ok(())
}
