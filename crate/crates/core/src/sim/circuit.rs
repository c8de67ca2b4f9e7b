use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::gate::{Gate, GateKind};
use crate::{Error, Result};

/// A zero-width control pulse placed inside an otherwise idle stretch of a
/// layer. `at` is the offset from the start of the layer; the pulse occupies
/// `[at, at + width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub qubit: usize,
    pub at: f64,
    pub width: f64,
    pub kind: GateKind,
}

/// One time slice: gates on pairwise-disjoint qubits plus optional pulses on
/// qubits that no gate touches.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub gates: Vec<Gate>,
    pub duration: f64,
    pub pulses: Vec<Pulse>,
}

impl Layer {
    pub fn new(gates: Vec<Gate>, duration: f64) -> Layer {
        Layer { gates, duration, pulses: Vec::new() }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.gates.iter().any(|g| g.qubits.contains(q))
    }

    fn has_pulse_on(&self, q: usize) -> bool {
        self.pulses.iter().any(|p| p.qubit == q)
    }
}

/// Maximal run of layers (positive total duration) during which a qubit is
/// not acted on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdleWindow {
    pub qubit: usize,
    pub start_layer: usize,
    /// Exclusive.
    pub end_layer: usize,
    pub duration: f64,
}

/// Two-qubit block record `U(a,b;θx,θy,θz)` used for block-level listings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRecord {
    pub a: usize,
    pub b: usize,
    pub theta: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    layers: Vec<Layer>,
    measured: Vec<usize>,
    /// Brick layers of two-qubit blocks, when the circuit was built from them.
    pub blocks: Vec<Vec<BlockRecord>>,
    /// Free-form metadata (boundary, order, flags) carried into reports.
    pub meta: BTreeMap<String, String>,
}

impl Circuit {
    /// Empty circuit measuring every qubit.
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            layers: Vec::new(),
            measured: (0..n_qubits).collect(),
            blocks: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn set_measured(&mut self, qubits: Vec<usize>) -> Result<()> {
        if qubits.is_empty() {
            return Err(Error::EmptyMeasurement);
        }
        let mut seen = vec![false; self.n_qubits];
        for &q in &qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        self.measured = qubits;
        Ok(())
    }

    /// Appends a unit-duration layer.
    pub fn push(&mut self, gates: Vec<Gate>) -> Result<()> {
        self.push_layer(Layer::new(gates, 1.0))
    }

    pub fn push_layer(&mut self, layer: Layer) -> Result<()> {
        self.check_layer(&layer, self.layers.len())?;
        self.layers.push(layer);
        Ok(())
    }

    fn check_layer(&self, layer: &Layer, index: usize) -> Result<()> {
        if !(layer.duration >= 0.0) {
            return Err(Error::InvalidParameter(format!("layer {index} has negative duration")));
        }
        let mut used = vec![false; self.n_qubits];
        for g in &layer.gates {
            g.validate(self.n_qubits)?;
            for q in g.qubits.iter() {
                if std::mem::replace(&mut used[q], true) {
                    return Err(Error::LayerConflict { layer: index, qubit: q });
                }
            }
        }
        for p in &layer.pulses {
            if p.qubit >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: p.qubit, n_qubits: self.n_qubits });
            }
            if used[p.qubit] {
                return Err(Error::LayerConflict { layer: index, qubit: p.qubit });
            }
            if p.kind.arity() != 1 || p.at < 0.0 || p.at + p.width > layer.duration + 1e-12 {
                return Err(Error::InvalidParameter(format!("pulse outside layer {index}")));
            }
        }
        Ok(())
    }

    /// Re-checks every layer; transforms call this after editing layers.
    pub fn validate(&self) -> Result<()> {
        for (i, l) in self.layers.iter().enumerate() {
            self.check_layer(l, i)?;
        }
        Ok(())
    }

    /// Builds a circuit from raw layers, validating them.
    pub fn from_layers(n_qubits: usize, layers: Vec<Layer>) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for l in layers {
            c.push_layer(l)?;
        }
        Ok(c)
    }

    /// Same metadata and measurement, new layers.
    pub fn with_layers(&self, layers: Vec<Layer>) -> Result<Circuit> {
        let c = Circuit { layers, ..self.clone() };
        c.validate()?;
        Ok(c)
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch { expected: self.n_qubits, got: other.n_qubits });
        }
        self.layers.extend(other.layers.iter().cloned());
        Ok(())
    }

    /// Layer-reversed, gate-inverted adjoint.
    pub fn inverse(&self) -> Circuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|l| Layer {
                gates: l.gates.iter().map(Gate::inverse).collect(),
                duration: l.duration,
                pulses: l
                    .pulses
                    .iter()
                    .rev()
                    .map(|p| Pulse { at: l.duration - p.at - p.width, kind: p.kind.inverse(), ..*p })
                    .collect(),
            })
            .collect();
        Circuit {
            layers,
            blocks: Vec::new(),
            ..self.clone()
        }
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len() + l.pulses.len()).sum()
    }

    pub fn count_where(&self, pred: impl Fn(&GateKind) -> bool) -> usize {
        self.layers
            .iter()
            .flat_map(|l| l.gates.iter().map(|g| &g.kind).chain(l.pulses.iter().map(|p| &p.kind)))
            .filter(|k| pred(k))
            .count()
    }

    pub fn cx_count(&self) -> usize {
        self.count_where(|k| matches!(k, GateKind::CX))
    }

    pub fn two_qubit_count(&self) -> usize {
        self.count_where(|k| k.arity() == 2)
    }

    /// Number of layers that contain at least one gate.
    pub fn depth(&self) -> usize {
        self.layers.iter().filter(|l| !l.gates.is_empty()).count()
    }

    pub fn total_duration(&self) -> f64 {
        self.layers.iter().map(|l| l.duration).sum()
    }

    /// Maximal idle windows of positive duration, ordered by qubit then time.
    /// Zero-duration layers that leave the qubit alone do not split a window.
    pub fn idle_windows(&self) -> Vec<IdleWindow> {
        let mut out = Vec::new();
        for q in 0..self.n_qubits {
            let mut open: Option<(usize, f64)> = None;
            for (i, l) in self.layers.iter().enumerate() {
                let busy = l.touches(q) || l.has_pulse_on(q);
                if busy {
                    if let Some((start, dur)) = open.take() {
                        if dur > 0.0 {
                            out.push(IdleWindow { qubit: q, start_layer: start, end_layer: i, duration: dur });
                        }
                    }
                } else {
                    let entry = open.get_or_insert((i, 0.0));
                    entry.1 += l.duration;
                }
            }
            if let Some((start, dur)) = open {
                if dur > 0.0 {
                    out.push(IdleWindow {
                        qubit: q,
                        start_layer: start,
                        end_layer: self.layers.len(),
                        duration: dur,
                    });
                }
            }
        }
        out
    }

    pub(crate) fn layers_mut(&mut self) -> &mut Vec<Layer> {
        &mut self.layers
    }

    /// Gate-level listing, one layer per line.
    pub fn listing(&self) -> String {
        let mut s = String::new();
        for (k, l) in self.layers.iter().enumerate() {
            let _ = write!(s, "L{}[{}]:", k + 1, l.duration);
            for g in &l.gates {
                let _ = write!(s, " {g}");
            }
            for p in &l.pulses {
                let _ = write!(s, " {}({})@{:.4}", p.kind, p.qubit, p.at);
            }
            s.push('\n');
        }
        s
    }

    /// Block-level listing `L<k>: U(a,b;θx,θy,θz) ...` for circuits built
    /// from two-qubit blocks; empty otherwise.
    pub fn block_listing(&self) -> String {
        let mut s = String::new();
        for (k, layer) in self.blocks.iter().enumerate() {
            let _ = write!(s, "L{}:", k + 1);
            for b in layer {
                let _ = write!(
                    s,
                    " U({},{};{:.6},{:.6},{:.6})",
                    b.a, b.b, b.theta[0], b.theta[1], b.theta[2]
                );
            }
            s.push('\n');
        }
        s
    }
}
