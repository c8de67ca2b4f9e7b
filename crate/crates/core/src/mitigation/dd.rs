use serde::{Deserialize, Serialize};

use crate::sim::{Circuit, GateKind, Pulse};
use crate::{Error, Result};

/// The `(t/4, X, t/2, X, t/4)` echo. `pulse_width` is the duration of each
/// X pulse; the delays share the remaining `t − 2·width`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DdSpec {
    pub pulse_width: f64,
}

impl DdSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.pulse_width >= 0.0) || !self.pulse_width.is_finite() {
            return Err(Error::InvalidParameter("DD pulse width must be a non-negative number".into()));
        }
        Ok(())
    }
}

/// Finds the layer in `start..end` that contains window-relative time `t`
/// and returns it with the layer-relative offset, nudged so that a pulse of
/// `width` fits inside the layer.
fn locate(circuit: &Circuit, start: usize, end: usize, t: f64, width: f64) -> Option<(usize, f64)> {
    let mut elapsed = 0.0;
    for i in start..end {
        let d = circuit.layers()[i].duration;
        if d > 0.0 && t < elapsed + d {
            let at = (t - elapsed).min(d - width);
            return (at >= 0.0).then_some((i, at));
        }
        elapsed += d;
    }
    None
}

/// Places the X echo in every maximal idle window. Windows too short for two
/// pulses are left alone and listed in `meta["dd_skipped"]`.
pub fn dd_insert(circuit: &Circuit, spec: &DdSpec) -> Result<Circuit> {
    spec.validate()?;
    let w = spec.pulse_width;
    let mut out = circuit.clone();
    let mut skipped = Vec::new();
    let mut inserted = 0usize;
    for win in circuit.idle_windows() {
        let free = win.duration - 2.0 * w;
        if free <= 0.0 {
            skipped.push(format!("q{}@L{}", win.qubit, win.start_layer));
            continue;
        }
        let t1 = free / 4.0;
        let t2 = t1 + w + free / 2.0;
        match (
            locate(circuit, win.start_layer, win.end_layer, t1, w),
            locate(circuit, win.start_layer, win.end_layer, t2, w),
        ) {
            (Some((l1, a1)), Some((l2, a2))) if (l1, a1) != (l2, a2) => {
                for (l, at) in [(l1, a1), (l2, a2)] {
                    out.layers_mut()[l].pulses.push(Pulse { qubit: win.qubit, at, width: w, kind: GateKind::X });
                }
                inserted += 1;
            }
            _ => skipped.push(format!("q{}@L{}", win.qubit, win.start_layer)),
        }
    }
    out.validate()?;
    out.meta.insert("dd_windows".into(), inserted.to_string());
    if !skipped.is_empty() {
        out.meta.insert("dd_skipped".into(), skipped.join(" "));
    }
    Ok(out)
}
