//! Dense oracles shared by the integration tests. Hamiltonians, their
//! exponentials and noise channels are assembled here from Pauli matrices;
//! only single-gate unitaries are read back from the simulator.

#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use spinquench::model::{Boundary, XXZParams};
use spinquench::sim::{apply_circuit, Circuit, StateVector};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(label: char) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let entries = match label {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        _ => panic!("not a Pauli: {label}"),
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Dense operator of a Pauli string; character `k` acts on qubit `k`
/// (qubit 0 is the least significant index bit).
pub fn pauli_string(labels: &str) -> DMatrix<Complex64> {
    labels
        .chars()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, l| pauli(l).kronecker(&acc))
}

/// `exp(-i(θx/2 XX + θy/2 YY + θz/2 ZZ))` by the matrix exponential.
pub fn xyz_exponential(theta: [f64; 3]) -> DMatrix<Complex64> {
    let g = pauli_string("XX") * c(theta[0] / 2.0, 0.0)
        + pauli_string("YY") * c(theta[1] / 2.0, 0.0)
        + pauli_string("ZZ") * c(theta[2] / 2.0, 0.0);
    let g4: Matrix4<Complex64> = Matrix4::from_iterator(g.iter().map(|x| x * c(0.0, -1.0)));
    let u = g4.exp();
    DMatrix::from_iterator(4, 4, u.iter().copied())
}

/// Unitary of a circuit, column `j` being the image of basis state `j`.
pub fn circuit_unitary(circuit: &Circuit) -> DMatrix<Complex64> {
    let n = circuit.n_qubits();
    let dim = 1 << n;
    let mut u = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let s = apply_circuit(StateVector::basis(n, j), circuit).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            u[(i, j)] = *a;
        }
    }
    u
}

/// Largest entry of `a − e^{iφ} b`, with `φ` aligning the two phases.
pub fn unitary_phase_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let overlap: Complex64 = (b.adjoint() * a).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    (a - b * phase).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// XXZ Hamiltonian assembled from Pauli strings:
/// `(J1/4) Σ_bonds (XX + YY + Δ ZZ)`.
pub fn dense_hamiltonian(params: &XXZParams) -> DMatrix<Complex64> {
    let n = params.n_qubits;
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|j| (j, j + 1)).collect();
    if params.boundary == Boundary::Periodic {
        bonds.push((n - 1, 0));
    }
    let dim = 1 << n;
    let mut h = DMatrix::zeros(dim, dim);
    for (a, b) in bonds {
        for (p, w) in [('X', 1.0), ('Y', 1.0), ('Z', params.delta)] {
            let labels: String = (0..n).map(|k| if k == a || k == b { p } else { 'I' }).collect();
            h += pauli_string(&labels) * c(params.j1 / 4.0 * w, 0.0);
        }
    }
    h
}

/// `e^{-iHt}|ψ⟩` through the eigendecomposition of the dense Hamiltonian.
pub fn dense_evolve(params: &XXZParams, initial: &StateVector, t: f64) -> StateVector {
    let h = dense_hamiltonian(params);
    let real = h.map(|x| x.re);
    let eig = real.symmetric_eigen();
    let v = eig.eigenvectors.map(|x| c(x, 0.0));
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| c(0.0, -e * t).exp()));
    let u = &v * phases * v.adjoint();
    let psi = DMatrix::from_column_slice(initial.amplitudes().len(), 1, initial.amplitudes());
    StateVector::from_amplitudes((u * psi).iter().copied().collect()).unwrap()
}

/// Staggered magnetization `(1/N) Σ_i (−1)^i ⟨S^z_i⟩` from probabilities, site
/// `i = j + 1` on qubit `j` (so the Néel state gives `−0.5`).
pub fn staggered_from_probabilities(probs: &[f64], n: usize) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let s: f64 = (0..n)
                .map(|j| {
                    let z = if i >> j & 1 == 0 { 0.5 } else { -0.5 };
                    if j % 2 == 0 { -z } else { z }
                })
                .sum();
            p * s / n as f64
        })
        .sum()
}

/// Density-matrix simulation of a circuit with the two-qubit depolarizing
/// channel (uniform over the 15 non-identity Paulis) after every CX.
pub fn depolarized_density(circuit: &Circuit, initial: &StateVector, p2: f64) -> DMatrix<Complex64> {
    let n = circuit.n_qubits();
    let psi = DMatrix::from_column_slice(1 << n, 1, initial.amplitudes());
    let mut rho = &psi * psi.adjoint();
    for layer in circuit.layers() {
        for g in &layer.gates {
            let mut one = Circuit::new(n);
            one.push(vec![*g]).unwrap();
            let u = circuit_unitary(&one);
            rho = &u * rho * u.adjoint();
            let qs: Vec<usize> = g.qubits.iter().collect();
            if qs.len() == 2 && p2 > 0.0 {
                let mut mixed = rho.clone() * c(1.0 - p2, 0.0);
                for k in 1..16 {
                    let (pa, pb) = (['I', 'X', 'Y', 'Z'][k % 4], ['I', 'X', 'Y', 'Z'][k / 4]);
                    let labels: String = (0..n)
                        .map(|q| if q == qs[0] { pa } else if q == qs[1] { pb } else { 'I' })
                        .collect();
                    let p = pauli_string(&labels);
                    mixed += &p * &rho * &p * c(p2 / 15.0, 0.0);
                }
                rho = mixed;
            }
        }
    }
    rho
}
