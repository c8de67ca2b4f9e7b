//! Builds the brick-wall Trotter circuits and prints their resources next to
//! the bundled resource table, then the gate listing of one small circuit.
//!
//! ```text
//! cargo run --example trotter_circuits
//! ```

use spinquench::model::{build_trotter_circuit, cx_count_closed_form, Boundary, TrotterOrder, XXZParams};
use spinquench::runner::bundled_resources;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<4} {:>4} {:>3} {:>7} {:>7} {:>7}", "bc", "N", "M", "cx", "table", "depth");
    for row in bundled_resources()? {
        let p = XXZParams::new(row.n_qubits, 1.0, 0.5, row.steps, row.boundary);
        let c = build_trotter_circuit(&p, TrotterOrder::SecondOptimized)?;
        assert_eq!(c.cx_count(), cx_count_closed_form(&p));
        println!(
            "{:<4} {:>4} {:>3} {:>7} {:>7} {:>7}",
            row.boundary.to_string(),
            row.n_qubits,
            row.steps,
            c.cx_count(),
            row.cx,
            c.depth()
        );
    }

    let p = XXZParams::new(4, 1.0, 0.5, 1, Boundary::Periodic);
    let c = build_trotter_circuit(&p, TrotterOrder::SecondOptimized)?;
    println!("\nN=4 PBC, one step: {} layers", c.layers().len());
    print!("{}", c.block_listing());

    let first = build_trotter_circuit(&p, TrotterOrder::First)?;
    println!("first order uses {} CX, second order {}", first.cx_count(), c.cx_count());
    Ok(())
}
