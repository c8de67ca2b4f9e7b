use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sim::rng::stream;
use crate::sim::{Circuit, Gate, GateKind, Layer, Pauli, Qubits};
use crate::{Error, Result};

type M4 = [[Complex64; 4]; 4];

/// `(P_a ⊗ P_b) → (P_c ⊗ P_d)` with `P_c ⊗ P_d = G (P_a ⊗ P_b) G†`; the first
/// letter of each pair acts on the gate's first qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwirlEntry {
    pub before: (Pauli, Pauli),
    pub after: (Pauli, Pauli),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlTable {
    pub cx: Vec<TwirlEntry>,
    pub cz: Vec<TwirlEntry>,
}

fn mul(a: &M4, b: &M4) -> M4 {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

fn dagger(a: &M4) -> M4 {
    let mut m = *a;
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[j][i].conj();
        }
    }
    m
}

/// `P_first` on the low local bit, `P_second` on the high one.
fn pauli_pair(first: Pauli, second: Pauli) -> M4 {
    let (lo, hi) = (first.matrix(), second.matrix());
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = hi[i >> 1][j >> 1] * lo[i & 1][j & 1];
        }
    }
    m
}

/// `|tr(A† B)| / 4`, which is 1 exactly when `B = e^{iφ} A` for unitaries.
fn phase_overlap(a: &M4, b: &M4) -> f64 {
    let t: Complex64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| a[i][j].conj() * b[i][j]).sum();
    t.norm() / 4.0
}

fn build(kind: GateKind) -> Result<Vec<TwirlEntry>> {
    let g = kind.matrix2().ok_or_else(|| Error::InvalidParameter(format!("{kind} is not a two-qubit gate")))?;
    let gd = dagger(&g);
    let mut out = Vec::with_capacity(16);
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let conj = mul(&mul(&g, &pauli_pair(a, b)), &gd);
            let after = Pauli::ALL
                .into_iter()
                .flat_map(|c| Pauli::ALL.into_iter().map(move |d| (c, d)))
                .find(|&(c, d)| (phase_overlap(&pauli_pair(c, d), &conj) - 1.0).abs() < 1e-12)
                .ok_or_else(|| Error::InvalidParameter(format!("{kind} is not Clifford")))?;
            // (P_c ⊗ P_d) · G · (P_a ⊗ P_b) must equal G up to phase
            let check = mul(&mul(&pauli_pair(after.0, after.1), &g), &pauli_pair(a, b));
            if (phase_overlap(&check, &g) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter("twirl identity violated".into()));
            }
            out.push(TwirlEntry { before: (a, b), after });
        }
    }
    Ok(out)
}

impl TwirlTable {
    /// Builds and verifies both tables.
    pub fn new() -> TwirlTable {
        TwirlTable {
            cx: build(GateKind::CX).expect("CX is Clifford"),
            cz: build(GateKind::CZ).expect("CZ is Clifford"),
        }
    }

    pub fn entries(&self, kind: &GateKind) -> Option<&[TwirlEntry]> {
        match kind {
            GateKind::CX => Some(&self.cx),
            GateKind::CZ => Some(&self.cz),
            _ => None,
        }
    }
}

impl Default for TwirlTable {
    fn default() -> Self {
        TwirlTable::new()
    }
}

fn push_paulis(gates: &mut Vec<Gate>, qubits: (usize, usize), paulis: (Pauli, Pauli)) {
    for (q, p) in [(qubits.0, paulis.0), (qubits.1, paulis.1)] {
        if p != Pauli::I {
            gates.push(Gate::pauli(q, p));
        }
    }
}

/// Wraps every CX/CZ with an independently drawn table entry, using
/// zero-duration layers before and after each two-qubit layer.
pub fn twirl_once<R: Rng>(circuit: &Circuit, table: &TwirlTable, rng: &mut R) -> Result<Circuit> {
    let mut layers = Vec::with_capacity(circuit.layers().len() * 3);
    for layer in circuit.layers() {
        let mut before = Vec::new();
        let mut after = Vec::new();
        for g in &layer.gates {
            if let (Some(entries), Qubits::Two(a, b)) = (table.entries(&g.kind), g.qubits) {
                let e = entries[rng.random_range(0..entries.len())];
                push_paulis(&mut before, (a, b), e.before);
                push_paulis(&mut after, (a, b), e.after);
            }
        }
        if !before.is_empty() {
            layers.push(Layer::new(before, 0.0));
        }
        layers.push(layer.clone());
        if !after.is_empty() {
            layers.push(Layer::new(after, 0.0));
        }
    }
    circuit.with_layers(layers)
}

/// `n_copies` independently twirled copies; copy `k` draws from stream
/// `(seed, k)`.
pub fn pauli_twirl(circuit: &Circuit, n_copies: usize, seed: u64) -> Result<Vec<Circuit>> {
    let table = TwirlTable::new();
    (0..n_copies)
        .map(|k| twirl_once(circuit, &table, &mut stream(seed, &[k as u64])))
        .collect()
}
