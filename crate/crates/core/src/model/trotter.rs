use std::f64::consts::FRAC_PI_2;

use super::params::{TrotterOrder, XXZParams};
use crate::sim::{BlockRecord, Circuit, Gate};
use crate::Result;

/// The seven moments of the 3-CX block
/// `exp(-i(θx/2 XX + θy/2 YY + θz/2 ZZ))` on qubits `(a, b)`; `b` controls
/// every CX.
pub fn block_gates(a: usize, b: usize, theta: [f64; 3]) -> [Vec<Gate>; 7] {
    let [tx, ty, tz] = theta;
    [
        vec![Gate::cx(b, a)],
        vec![Gate::rz(a, tz), Gate::h(b)],
        vec![Gate::rz(b, tx + FRAC_PI_2)],
        vec![Gate::cx(b, a)],
        vec![Gate::rz(a, -ty), Gate::h(b)],
        vec![Gate::cx(b, a)],
        vec![Gate::sx(a), Gate::sxdg(b)],
    ]
}

/// Two-qubit circuit holding a single block on `(0, 1)`.
pub fn unit_block(theta: [f64; 3]) -> Circuit {
    let mut c = Circuit::new(2);
    for moment in block_gates(0, 1, theta) {
        c.push(moment).expect("block moments act on disjoint qubits");
    }
    c.blocks.push(vec![BlockRecord { a: 0, b: 1, theta }]);
    c
}

/// Builds a brick-wall circuit: brick layer `k` applies blocks on the odd
/// bonds when `k` is even (0-based) and on the even bonds otherwise, each at
/// `thetas[k]`. Zero-angle blocks stay in the circuit as physical gates.
pub fn build_layered(params: &XXZParams, thetas: &[[f64; 3]]) -> Result<Circuit> {
    params.validate()?;
    let n = params.n_qubits;
    let mut c = Circuit::new(n);
    let odd = params.odd_bonds();
    let even = params.even_bonds();
    for (k, &theta) in thetas.iter().enumerate() {
        let bonds = if k % 2 == 0 { &odd } else { &even };
        let mut moments: [Vec<Gate>; 7] = Default::default();
        for &(a, b) in bonds {
            for (m, gates) in block_gates(a, b, theta).into_iter().enumerate() {
                moments[m].extend(gates);
            }
        }
        for m in moments {
            c.push(m)?;
        }
        c.blocks
            .push(bonds.iter().map(|&(a, b)| BlockRecord { a, b, theta }).collect());
    }
    c.meta.insert("boundary".into(), params.boundary.to_string());
    c.meta.insert("n_steps".into(), params.n_steps.to_string());
    c.meta.insert("dt".into(), format!("{}", params.dt));
    Ok(c)
}

fn scale(theta: [f64; 3], s: f64) -> [f64; 3] {
    theta.map(|t| t * s)
}

/// Brick-layer angles for a sequence of per-step time signs in the merged
/// second-order layout `A(s₁/2) B(s₁) A((s₁+s₂)/2) B(s₂) … B(s_M) A(s_M/2)`.
fn second_order_angles(theta: [f64; 3], signs: &[f64]) -> Vec<[f64; 3]> {
    let m = signs.len();
    let mut out = Vec::with_capacity(2 * m + 1);
    out.push(scale(theta, signs[0] / 2.0));
    for k in 0..m {
        out.push(scale(theta, signs[k]));
        let next = if k + 1 < m { signs[k + 1] } else { 0.0 };
        out.push(scale(theta, (signs[k] + next) / 2.0));
    }
    out
}

/// Time-evolution circuit for `params.n_steps` steps of size `params.dt`.
pub fn build_trotter_circuit(params: &XXZParams, order: TrotterOrder) -> Result<Circuit> {
    params.validate()?;
    let theta = params.theta();
    let m = params.n_steps;
    let thetas: Vec<[f64; 3]> = match order {
        TrotterOrder::First => (0..2 * m).map(|_| theta).collect(),
        TrotterOrder::SecondOptimized => second_order_angles(theta, &vec![1.0; m]),
    };
    let mut c = build_layered(params, &thetas)?;
    c.meta.insert(
        "order".into(),
        match order {
            TrotterOrder::First => "first",
            TrotterOrder::SecondOptimized => "second_optimized",
        }
        .into(),
    );
    Ok(c)
}

/// Per-step time signs of the self-mitigation test circuit: `+` for the first
/// `⌈M/2⌉` steps, `−` afterwards.
pub fn sm_step_signs(m: usize) -> Vec<f64> {
    let forward = m.div_ceil(2);
    (0..m).map(|k| if k < forward { 1.0 } else { -1.0 }).collect()
}

/// Forward-then-backward test circuit in the optimized second-order layout.
/// For even `M` its noiseless action is the identity up to a global phase;
/// odd `M` is flagged in `meta["sm_odd_steps"]`.
pub fn build_sm_test_circuit(params: &XXZParams) -> Result<Circuit> {
    params.validate()?;
    let signs = sm_step_signs(params.n_steps);
    let mut c = build_layered(params, &second_order_angles(params.theta(), &signs))?;
    c.meta.insert("order".into(), "second_optimized".into());
    c.meta.insert("role".into(), "sm_test".into());
    if params.n_steps % 2 == 1 {
        c.meta.insert("sm_odd_steps".into(), "true".into());
    }
    Ok(c)
}

/// `3·[(M+1)·⌊N/2⌋ + M·|even bonds|]`, the CX count of the optimized
/// second-order circuit.
pub fn cx_count_closed_form(params: &XXZParams) -> usize {
    let m = params.n_steps;
    3 * ((m + 1) * params.odd_bonds().len() + m * params.even_bonds().len())
}
