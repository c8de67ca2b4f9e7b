use rand::Rng;

use crate::sim::rng::stream;
use crate::sim::{Circuit, CountsHistogram, Gate, Layer};
use crate::{Error, Result};

/// `n_samples` copies of `circuit`, each with random X gates on a subset of
/// the measured qubits just before measurement. Mask bit `k` refers to
/// measured bit `k`. A zero mask leaves the circuit unchanged.
pub fn trex_expand(circuit: &Circuit, n_samples: usize, seed: u64) -> Result<Vec<(Circuit, u64)>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("TREX needs at least one sample".into()));
    }
    let measured = circuit.measured().to_vec();
    (0..n_samples)
        .map(|k| {
            let mut rng = stream(seed, &[k as u64]);
            let mask: u64 = measured
                .iter()
                .enumerate()
                .fold(0, |m, (bit, _)| if rng.random::<bool>() { m | (1 << bit) } else { m });
            let mut c = circuit.clone();
            let flips: Vec<Gate> = measured
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &q)| Gate::x(q))
                .collect();
            if !flips.is_empty() {
                c.push_layer(Layer::new(flips, 0.0))?;
            }
            Ok((c, mask))
        })
        .collect()
}

/// Undoes each sample's flips classically and sums the histograms.
pub fn trex_collapse(results: &[(CountsHistogram, u64)]) -> Result<CountsHistogram> {
    let (first, _) = results.first().ok_or(Error::EmptyCounts)?;
    let mut out = CountsHistogram::new(first.width());
    for (counts, mask) in results {
        out.merge(&counts.xor(*mask))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_are_deterministic() {
        let c = Circuit::new(5);
        let a: Vec<u64> = trex_expand(&c, 10, 3).unwrap().into_iter().map(|x| x.1).collect();
        let b: Vec<u64> = trex_expand(&c, 10, 3).unwrap().into_iter().map(|x| x.1).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|m| *m < 32));
    }

    #[test]
    fn zero_mask_leaves_circuit_alone() {
        let c = Circuit::new(3);
        for (expanded, mask) in trex_expand(&c, 20, 1).unwrap() {
            assert_eq!(expanded.layers().len(), usize::from(mask != 0));
            assert_eq!(expanded.gate_count(), mask.count_ones() as usize);
        }
    }

    #[test]
    fn all_ones_mask_round_trip() {
        let mut flipped = CountsHistogram::new(3);
        flipped.add(0b111, 50);
        let back = trex_collapse(&[(flipped, 0b111)]).unwrap();
        assert_eq!(back.get(0), 50);
        let mut plain = CountsHistogram::new(2);
        plain.add(0b01, 4);
        assert_eq!(trex_collapse(&[(plain.clone(), 0)]).unwrap(), plain);
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let a = (CountsHistogram::new(2), 0);
        let b = (CountsHistogram::new(3), 0);
        assert!(trex_collapse(&[a, b]).is_err());
    }
}
