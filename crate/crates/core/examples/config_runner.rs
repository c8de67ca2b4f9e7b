//! Drives the file-based runner from an in-memory configuration: parses it,
//! runs the magnetization workload into a temporary directory and lists the
//! written files. The same configuration works with the `spinquench` binary.
//!
//! ```text
//! cargo run --release --example config_runner
//! ```

use spinquench::runner::{run, ExperimentConfig};

const CONFIG: &str = "\
[experiment]
workload = magnetization
seed = 11
shots = 20000
repetitions = 2

[model]
n_qubits = 6
steps = 5
boundary = OBC

[noise]
preset = device

[mitigation]
preset = TREX+DD+PT
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    println!("config hash {}", cfg.hash());
    print!("{}", cfg.to_ini());
    let dir = std::env::temp_dir().join(format!("spinquench-example-{}", std::process::id()));
    let outcome = run(&cfg, &dir)?;
    print!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    println!("{}", std::fs::read_to_string(dir.join("results.csv"))?);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
