use num_complex::Complex64;
use rand::Rng;

use super::circuit::{Circuit, Layer};
use super::counts::{CountsHistogram, Distribution};
use super::gate::{Gate, GateKind, Matrix2, Pauli, Qubits};
use super::rng;
use super::{C0, C1};
use crate::{Error, Result};

/// Dense register of `2^n` amplitudes; bit `k` of an index is qubit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> StateVector {
        StateVector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> StateVector {
        let mut amps = vec![C0; 1 << n_qubits];
        amps[index] = C1;
        StateVector { n_qubits, amps }
    }

    /// Wraps and normalizes raw amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<StateVector> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("length {len} is not a power of two")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero or non-finite norm".into()));
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Tensor product `self ⊗ high`: `high` occupies the upper qubits.
    pub fn kron(&self, high: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * high.amps.len());
        for h in &high.amps {
            amps.extend(self.amps.iter().map(|l| l * h));
        }
        StateVector { n_qubits: self.n_qubits + high.n_qubits, amps }
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Applies a 2×2 matrix to qubit `q` without validation.
    pub(crate) fn apply_matrix1(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        let [[a, b], [c, d]] = *m;
        for base in 0..self.amps.len() {
            if base & bit != 0 {
                continue;
            }
            let i1 = base | bit;
            let x0 = self.amps[base];
            let x1 = self.amps[i1];
            self.amps[base] = a * x0 + b * x1;
            self.amps[i1] = c * x0 + d * x1;
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// Applies a single-qubit Pauli (no-op for identity).
    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        match p {
            Pauli::I => {}
            Pauli::X => {
                let bit = 1usize << q;
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Pauli::Z => {
                let bit = 1usize << q;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::Y => self.apply_matrix1(q, &p.matrix()),
        }
    }

    /// `exp(-i θ/2 Z_q)`.
    pub fn apply_rz(&mut self, q: usize, theta: f64) {
        let lo = Complex64::from_polar(1.0, -theta / 2.0);
        let hi = lo.conj();
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { lo } else { hi };
        }
    }

    /// `exp(-i θ/2 Z_a Z_b)`.
    pub fn apply_rzz(&mut self, a: usize, b: usize, theta: f64) {
        let same = Complex64::from_polar(1.0, -theta / 2.0);
        let diff = same.conj();
        let (ba, bb) = (1usize << a, 1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            let parity = ((i & ba) != 0) ^ ((i & bb) != 0);
            *amp *= if parity { diff } else { same };
        }
    }

    /// Applies a gate after validating it against this register.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        match (gate.kind, gate.qubits) {
            (GateKind::CX, Qubits::Two(c, t)) => self.apply_cx(c, t),
            (GateKind::CZ, Qubits::Two(a, b)) => self.apply_cz(a, b),
            (GateKind::X, Qubits::One(q)) => self.apply_pauli(q, Pauli::X),
            (GateKind::Pauli(p), Qubits::One(q)) => self.apply_pauli(q, p),
            (GateKind::Rz(t), Qubits::One(q)) => self.apply_rz(q, t),
            (kind, Qubits::One(q)) => {
                let m = kind.matrix1().expect("single-qubit kind");
                self.apply_matrix1(q, &m)
            }
            (kind, q) => unreachable!("{kind} on {q:?} passed validation"),
        }
    }

    /// Applies a layer's gates, then its pulses in time order.
    pub(crate) fn apply_layer(&mut self, layer: &Layer) {
        for g in &layer.gates {
            self.apply_unchecked(g);
        }
        let mut pulses = layer.pulses.clone();
        pulses.sort_by(|a, b| a.at.total_cmp(&b.at));
        for p in pulses {
            self.apply_unchecked(&Gate { kind: p.kind, qubits: Qubits::One(p.qubit) });
        }
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::QubitCountMismatch { expected: self.n_qubits, got: circuit.n_qubits() });
        }
        for layer in circuit.layers() {
            self.apply_layer(layer);
        }
        Ok(())
    }

    /// Marginal Born distribution over `measured`; bit `k` of an outcome is
    /// `measured[k]`.
    pub fn marginal(&self, measured: &[usize]) -> Result<Vec<f64>> {
        if measured.is_empty() {
            return Err(Error::EmptyMeasurement);
        }
        for &q in measured {
            self.check(q)?;
        }
        let mut out = vec![0.0; 1 << measured.len()];
        let identity = measured.iter().enumerate().all(|(k, &q)| k == q);
        for (i, a) in self.amps.iter().enumerate() {
            let key = if identity && measured.len() == self.n_qubits {
                i
            } else {
                gather_bits(i, measured)
            };
            out[key] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Exact outcome distribution over `measured` (the infinite-shot limit).
    pub fn distribution(&self, measured: &[usize]) -> Result<Distribution> {
        let probs = self.marginal(measured)?;
        Ok(Distribution::from_dense(measured.len(), &probs))
    }

    /// `⟨Z_mask⟩` for the Z-string on the qubits set in `mask`.
    pub fn expectation_z(&self, mask: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if (i & mask).count_ones().is_multiple_of(2) { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }
}

/// Packs the bits of `index` selected by `qubits` into a dense key.
pub(crate) fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// Cumulative distribution normalised to its own total.
pub(crate) fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let total = acc;
    for c in &mut cdf {
        *c /= total;
    }
    cdf
}

/// Inverse-CDF draw; `u ∈ [0, 1)`.
pub(crate) fn draw_index(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Shot-by-shot inverse-CDF sampling with a caller-provided generator.
pub(crate) fn sample_from_cdf<R: Rng>(cdf: &[f64], shots: u64, width: usize, rng: &mut R) -> CountsHistogram {
    let mut counts = CountsHistogram::new(width);
    for _ in 0..shots {
        let u: f64 = rng.random();
        counts.add(draw_index(cdf, u) as u64, 1);
    }
    counts
}

/// Returns `U|ψ⟩` for a single gate.
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// Returns the state after every layer of `circuit`.
pub fn apply_circuit(mut state: StateVector, circuit: &Circuit) -> Result<StateVector> {
    state.run(circuit)?;
    Ok(state)
}

/// Multinomial sample of `shots` outcomes over `measured_qubits`,
/// deterministic in `seed`.
pub fn sample_counts(
    state: &StateVector,
    shots: u64,
    seed: u64,
    measured_qubits: &[usize],
) -> Result<CountsHistogram> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be positive".into()));
    }
    let probs = state.marginal(measured_qubits)?;
    let cdf = cumulative(&probs);
    let mut rng = rng::stream(seed, &[]);
    Ok(sample_from_cdf(&cdf, shots, measured_qubits.len(), &mut rng))
}
