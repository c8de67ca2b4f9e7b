//! Two-circuit multi-programming: circuit `A` on qubits `[0, N_a)`, one idle
//! spacer at `N_a`, circuit `B` on `(N_a, N_a + N_b]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{build_rm_circuits, RandomUnitaryBatch, RmOptions};
use crate::sim::rng::stream;
use crate::sim::{
    apply_circuit, cumulative, draw_index, gather_bits, Circuit, CountsHistogram, Gate, Layer, Pulse, Qubits,
    StateVector,
};
use crate::{Error, Result};

/// Where each sub-circuit lives in the packed circuit and in its merged
/// measurement bitstring. Merged bits list `A`'s measured qubits first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackLayout {
    pub width_a: usize,
    pub width_b: usize,
    pub spacers: Vec<usize>,
    /// Merged bit positions holding `A`'s measured bits, in `A`'s order.
    pub bits_a: Vec<usize>,
    pub bits_b: Vec<usize>,
}

impl PackLayout {
    pub fn n_qubits(&self) -> usize {
        self.width_a + self.spacers.len() + self.width_b
    }

    pub fn merged_width(&self) -> usize {
        self.bits_a.len() + self.bits_b.len()
    }

    pub fn offset_b(&self) -> usize {
        self.width_a + self.spacers.len()
    }

    /// Disjoint maps covering `0..merged_width`, spacers not measured.
    pub fn validate(&self) -> Result<()> {
        let mut all: Vec<usize> = self.bits_a.iter().chain(&self.bits_b).copied().collect();
        all.sort_unstable();
        if all != (0..self.merged_width()).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter("pack layout bit maps must partition the merged bits".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("layout serializes")
    }

    pub fn from_json(s: &str) -> Result<PackLayout> {
        let l: PackLayout = serde_json::from_str(s).map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
        l.validate()?;
        Ok(l)
    }
}

fn shift_gate(g: &Gate, by: usize) -> Gate {
    let qubits = match g.qubits {
        Qubits::One(q) => Qubits::One(q + by),
        Qubits::Two(a, b) => Qubits::Two(a + by, b + by),
    };
    Gate { kind: g.kind, qubits }
}

/// Zip-merges the layers of `a` and `b`; a merged layer lasts as long as the
/// longer of its two parts.
pub fn pack(a: &Circuit, b: &Circuit) -> Result<(Circuit, PackLayout)> {
    let layout = PackLayout {
        width_a: a.n_qubits(),
        width_b: b.n_qubits(),
        spacers: vec![a.n_qubits()],
        bits_a: (0..a.measured().len()).collect(),
        bits_b: (a.measured().len()..a.measured().len() + b.measured().len()).collect(),
    };
    let off = layout.offset_b();
    let n = layout.n_qubits();
    let depth = a.layers().len().max(b.layers().len());
    let mut layers = Vec::with_capacity(depth);
    for i in 0..depth {
        let la = a.layers().get(i);
        let lb = b.layers().get(i);
        let mut gates: Vec<Gate> = la.map(|l| l.gates.clone()).unwrap_or_default();
        let mut pulses: Vec<Pulse> = la.map(|l| l.pulses.clone()).unwrap_or_default();
        if let Some(l) = lb {
            gates.extend(l.gates.iter().map(|g| shift_gate(g, off)));
            pulses.extend(l.pulses.iter().map(|p| Pulse { qubit: p.qubit + off, ..*p }));
        }
        let duration = la.map_or(0.0, |l| l.duration).max(lb.map_or(0.0, |l| l.duration));
        layers.push(Layer { gates, duration, pulses });
    }
    let mut packed = Circuit::from_layers(n, layers)?;
    let measured: Vec<usize> = a.measured().iter().copied().chain(b.measured().iter().map(|q| q + off)).collect();
    packed.set_measured(measured)?;
    packed.meta.insert("qmp_layout".into(), layout.to_json());
    Ok((packed, layout))
}

/// `|a⟩ ⊗ |0⟩_spacer ⊗ |b⟩` in the packed qubit order.
pub fn pack_states(a: &StateVector, b: &StateVector) -> StateVector {
    a.kron(&StateVector::zero(1)).kron(b)
}

/// Projects each merged outcome onto the two bit maps.
pub fn split_counts(counts: &CountsHistogram, layout: &PackLayout) -> Result<(CountsHistogram, CountsHistogram)> {
    if counts.width() != layout.merged_width() {
        return Err(Error::WidthMismatch { expected: layout.merged_width(), got: counts.width() });
    }
    Ok((counts.marginalize(&layout.bits_a)?, counts.marginalize(&layout.bits_b)?))
}

/// Noiseless sampling of a packed circuit with one generator per
/// sub-circuit: each shot draws `A`'s bits from their marginal with `rng_a`,
/// then `B`'s bits from the conditional given `A` with `rng_b`. With a
/// product state this reproduces, shot for shot, what the two circuits
/// would give when sampled alone with the same generators.
pub fn sample_packed<RA: Rng, RB: Rng>(
    packed: &Circuit,
    initial: &StateVector,
    layout: &PackLayout,
    shots: u64,
    rng_a: &mut RA,
    rng_b: &mut RB,
) -> Result<CountsHistogram> {
    let state = apply_circuit(initial.clone(), packed)?;
    let probs = state.marginal(packed.measured())?;
    let na = layout.bits_a.len();
    let nb = layout.bits_b.len();
    // joint[a][b] over dense sub-keys
    let mut joint = vec![vec![0.0; 1 << nb]; 1 << na];
    for (k, p) in probs.iter().enumerate() {
        joint[gather_bits(k, &layout.bits_a)][gather_bits(k, &layout.bits_b)] += p;
    }
    let marginal_a: Vec<f64> = joint.iter().map(|row| row.iter().sum()).collect();
    let cdf_a = cumulative(&marginal_a);
    let cdf_b: Vec<Option<Vec<f64>>> =
        joint.iter().zip(&marginal_a).map(|(row, &pa)| (pa > 0.0).then(|| cumulative(row))).collect();
    let mut out = CountsHistogram::new(layout.merged_width());
    for _ in 0..shots {
        let a = draw_index(&cdf_a, rng_a.random());
        let cdf = cdf_b[a].as_ref().expect("drawn outcome has positive probability");
        let b = draw_index(cdf, rng_b.random());
        let merged = scatter(a, &layout.bits_a) | scatter(b, &layout.bits_b);
        out.add(merged, 1);
    }
    Ok(out)
}

fn scatter(key: usize, bits: &[usize]) -> u64 {
    bits.iter().enumerate().fold(0u64, |acc, (k, &b)| acc | ((((key >> k) & 1) as u64) << b))
}

/// Noiseless randomized-measurement histograms with instances packed in
/// pairs `(0, 1), (2, 3), …`. Instance `i` is sampled from the same stream as
/// in [`crate::entropy::rm_instance_counts`], so the split histograms are
/// identical to the unpacked ones. An odd last instance runs alone.
pub fn packed_rm_counts(
    base: &Circuit,
    initial: &StateVector,
    subsystem: &[usize],
    opts: &RmOptions,
) -> Result<Vec<CountsHistogram>> {
    let shots = opts
        .shots
        .ok_or_else(|| Error::InvalidParameter("packed sampling needs a shot count".into()))?;
    let state = apply_circuit(initial.clone(), base)?;
    let batch = RandomUnitaryBatch::sample(opts.n_instances, subsystem.len(), opts.batch_seed());
    let circuits = build_rm_circuits(&Circuit::new(base.n_qubits()), subsystem, &batch)?;
    let seed = opts.sampling_seed();
    let mut out = Vec::with_capacity(circuits.len());
    for (pair, chunk) in circuits.chunks(2).enumerate() {
        let i = 2 * pair as u64;
        match chunk {
            [a, b] => {
                let (packed, layout) = pack(a, b)?;
                let merged = sample_packed(
                    &packed,
                    &pack_states(&state, &state),
                    &layout,
                    shots,
                    &mut stream(seed, &[i]),
                    &mut stream(seed, &[i + 1]),
                )?;
                let (ca, cb) = split_counts(&merged, &layout)?;
                out.push(ca);
                out.push(cb);
            }
            [a] => {
                let probs = apply_circuit(state.clone(), a)?.marginal(a.measured())?;
                out.push(crate::sim::sample_from_cdf(
                    &cumulative(&probs),
                    shots,
                    a.measured().len(),
                    &mut stream(seed, &[i]),
                ));
            }
            _ => unreachable!(),
        }
    }
    Ok(out)
}
