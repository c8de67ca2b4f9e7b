use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::{Error, Result};

/// Shot counts keyed by outcome; bit `k` of a key is measured bit `k`, which
/// renders as the `k`-th character from the right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountsHistogram {
    width: usize,
    counts: BTreeMap<u64, u64>,
}

impl CountsHistogram {
    pub fn new(width: usize) -> CountsHistogram {
        assert!(width <= 64, "bitstrings wider than 64 bits are not supported");
        CountsHistogram { width, counts: BTreeMap::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn add(&mut self, outcome: u64, n: u64) {
        if n > 0 {
            *self.counts.entry(outcome).or_insert(0) += n;
        }
    }

    pub fn get(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of distinct observed outcomes.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Adds another histogram of the same width.
    pub fn merge(&mut self, other: &CountsHistogram) -> Result<()> {
        if other.width != self.width {
            return Err(Error::WidthMismatch { expected: self.width, got: other.width });
        }
        for (k, v) in other.iter() {
            self.add(k, v);
        }
        Ok(())
    }

    /// Every outcome XOR-ed with `mask`.
    pub fn xor(&self, mask: u64) -> CountsHistogram {
        let mut out = CountsHistogram::new(self.width);
        for (k, v) in self.iter() {
            out.add(k ^ mask, v);
        }
        out
    }

    /// Projects onto the listed bit positions (new bit `k` = old bit `bits[k]`).
    pub fn marginalize(&self, bits: &[usize]) -> Result<CountsHistogram> {
        if let Some(&b) = bits.iter().find(|&&b| b >= self.width) {
            return Err(Error::QubitOutOfRange { index: b, n_qubits: self.width });
        }
        let mut out = CountsHistogram::new(bits.len());
        for (k, v) in self.iter() {
            let key = bits.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (((k >> b) & 1) << i));
            out.add(key, v);
        }
        Ok(out)
    }

    pub fn render_bits(&self, outcome: u64) -> String {
        (0..self.width).rev().map(|b| if (outcome >> b) & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// `<bitstring> <count>` per line, closed by `# total <shots>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.iter() {
            let _ = writeln!(s, "{} {}", self.render_bits(k), v);
        }
        let _ = writeln!(s, "# total {}", self.total());
        s
    }

    pub fn from_text(text: &str) -> Result<CountsHistogram> {
        let mut hist: Option<CountsHistogram> = None;
        let mut trailer = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("total") {
                    let n = it.next().and_then(|t| t.parse::<u64>().ok()).ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: "malformed total trailer".into(),
                    })?;
                    trailer = Some(n);
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let (bits, count) = match (it.next(), it.next(), it.next()) {
                (Some(b), Some(c), None) => (b, c),
                _ => return Err(Error::Parse { line: line_no, message: "expected `<bits> <count>`".into() }),
            };
            if bits.len() > 64 || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Parse { line: line_no, message: format!("bad bitstring `{bits}`") });
            }
            let count: u64 = count
                .parse()
                .map_err(|_| Error::Parse { line: line_no, message: format!("bad count `{count}`") })?;
            let h = hist.get_or_insert_with(|| CountsHistogram::new(bits.len()));
            if bits.len() != h.width {
                return Err(Error::Parse { line: line_no, message: "inconsistent bitstring width".into() });
            }
            let key = u64::from_str_radix(bits, 2).expect("validated binary");
            h.add(key, count);
        }
        let hist = hist.ok_or(Error::EmptyCounts)?;
        match trailer {
            Some(n) if n == hist.total() => Ok(hist),
            Some(n) => Err(Error::Parse {
                line: text.lines().count(),
                message: format!("trailer total {n} disagrees with sum {}", hist.total()),
            }),
            None => Err(Error::Parse { line: text.lines().count(), message: "missing `# total` trailer".into() }),
        }
    }
}

/// Exact outcome probabilities (the infinite-shot limit of a histogram).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Distribution {
    width: usize,
    probs: BTreeMap<u64, f64>,
}

impl Distribution {
    pub fn new(width: usize) -> Distribution {
        Distribution { width, probs: BTreeMap::new() }
    }

    pub fn from_dense(width: usize, probs: &[f64]) -> Distribution {
        let mut d = Distribution::new(width);
        for (k, &p) in probs.iter().enumerate() {
            if p > 0.0 {
                d.probs.insert(k as u64, p);
            }
        }
        d
    }

    pub fn from_counts(counts: &CountsHistogram) -> Distribution {
        let total = counts.total() as f64;
        let mut d = Distribution::new(counts.width());
        for (k, v) in counts.iter() {
            d.probs.insert(k, v as f64 / total);
        }
        d
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn marginalize(&self, bits: &[usize]) -> Distribution {
        let mut out = Distribution::new(bits.len());
        for (k, v) in self.iter() {
            let key = bits.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (((k >> b) & 1) << i));
            *out.probs.entry(key).or_insert(0.0) += v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_qubit_zero_rightmost() {
        let mut h = CountsHistogram::new(3);
        h.add(0b001, 7);
        h.add(0b100, 3);
        assert_eq!(h.to_text(), "001 7\n100 3\n# total 10\n");
    }

    #[test]
    fn parse_rejects_bad_trailer_and_width() {
        assert!(CountsHistogram::from_text("01 3\n# total 4\n").is_err());
        assert!(CountsHistogram::from_text("01 3\n").is_err());
        let err = CountsHistogram::from_text("01 3\n011 1\n# total 4\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, message: "inconsistent bitstring width".into() });
    }

    #[test]
    fn marginalize_keeps_totals() {
        let mut h = CountsHistogram::new(3);
        h.add(0b101, 4);
        h.add(0b011, 6);
        let m = h.marginalize(&[2, 0]).unwrap();
        assert_eq!(m.get(0b11), 4);
        assert_eq!(m.get(0b10), 6);
        assert_eq!(m.total(), h.total());
    }

    proptest! {
        #[test]
        fn text_round_trip(entries in proptest::collection::btree_map(0u64..256, 1u64..1000, 1..20)) {
            let mut h = CountsHistogram::new(8);
            for (k, v) in entries {
                h.add(k, v);
            }
            prop_assert_eq!(CountsHistogram::from_text(&h.to_text()).unwrap(), h);
        }
    }
}
