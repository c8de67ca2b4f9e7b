//! Packs two randomized-measurement circuits side by side with one idle
//! spacer qubit, samples the merged register and splits the histogram.
//! The split histograms are identical to separate runs.
//!
//! ```text
//! cargo run --release --example multiprogramming
//! ```

use spinquench::entropy::{rm_instance_counts, RmOptions};
use spinquench::model::{build_trotter_circuit, neel_state, Boundary, TrotterOrder, XXZParams};
use spinquench::qmp::{pack, packed_rm_counts, PackLayout};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let p = XXZParams::new(n, 1.0, 0.5, 3, Boundary::Open);
    let c = build_trotter_circuit(&p, TrotterOrder::SecondOptimized)?;

    let (packed, layout) = pack(&c, &c)?;
    println!(
        "packed {} + {} qubits into {} ({} CX, was 2 × {})",
        layout.width_a,
        layout.width_b,
        packed.n_qubits(),
        packed.cx_count(),
        c.cx_count()
    );
    println!("layout json: {}", layout.to_json());
    assert_eq!(PackLayout::from_json(&layout.to_json())?, layout);

    let neel = neel_state(n)?;
    let subsystem = [0, 1, 2];
    let opts = RmOptions { n_instances: 9, shots: Some(5_000), seed: 3, ..RmOptions::default() };
    let alone = rm_instance_counts(&c, &neel, &subsystem, &opts)?;
    let paired = packed_rm_counts(&c, &neel, &subsystem, &opts)?;
    for (i, (a, b)) in alone.iter().zip(&paired).enumerate() {
        println!("instance {i}: {} outcomes, identical = {}", a.distinct(), a == b);
    }
    Ok(())
}
