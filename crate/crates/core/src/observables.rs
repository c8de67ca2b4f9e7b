//! Staggered magnetization and error metrics.
//!
//! Site `i` (1-based) lives on qubit `i − 1`; bit 0 is spin-up (+½).
//! `M_st = (1/N) Σ_i (−1)^i S^z_i`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::sim::{CountsHistogram, Distribution, StateVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObservableKind {
    StaggeredMagnetization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    pub n_sites: usize,
}

impl ObservableSpec {
    pub fn staggered(n_sites: usize) -> ObservableSpec {
        ObservableSpec { kind: ObservableKind::StaggeredMagnetization, n_sites }
    }

    /// Value of the observable for one measured outcome.
    pub fn shot_value(&self, outcome: u64) -> f64 {
        match self.kind {
            ObservableKind::StaggeredMagnetization => staggered_shot_value(outcome, self.n_sites),
        }
    }

    /// `(mean, standard error)` from a histogram.
    pub fn estimate(&self, counts: &CountsHistogram) -> Result<(f64, f64)> {
        match self.kind {
            ObservableKind::StaggeredMagnetization => staggered_magnetization_counts(counts, self.n_sites),
        }
    }

    pub fn exact(&self, state: &StateVector) -> Result<f64> {
        if state.n_qubits() != self.n_sites {
            return Err(Error::WidthMismatch { expected: self.n_sites, got: state.n_qubits() });
        }
        Ok(match self.kind {
            ObservableKind::StaggeredMagnetization => staggered_magnetization_exact(state),
        })
    }
}

/// `(1/2N) Σ_j (−1)^{j+1} (1 − 2 b_j)`.
pub fn staggered_shot_value(outcome: u64, n: usize) -> f64 {
    let mut acc = 0i64;
    for j in 0..n {
        let spin = if (outcome >> j) & 1 == 0 { 1 } else { -1 };
        acc += if j % 2 == 0 { -spin } else { spin };
    }
    acc as f64 / (2.0 * n as f64)
}

/// Sample mean and standard error of the per-shot estimator.
pub fn staggered_magnetization_counts(counts: &CountsHistogram, n: usize) -> Result<(f64, f64)> {
    if counts.width() != n {
        return Err(Error::WidthMismatch { expected: n, got: counts.width() });
    }
    let shots = counts.total();
    if shots == 0 {
        return Err(Error::EmptyCounts);
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for (k, c) in counts.iter() {
        let v = staggered_shot_value(k, n);
        s1 += c as f64 * v;
        s2 += c as f64 * v * v;
    }
    let s = shots as f64;
    let mean = s1 / s;
    if shots == 1 {
        return Ok((mean, 0.0));
    }
    let var = ((s2 - s * mean * mean) / (s - 1.0)).max(0.0);
    Ok((mean, (var / s).sqrt()))
}

/// Infinite-shot value from an exact outcome distribution.
pub fn staggered_magnetization_distribution(dist: &Distribution, n: usize) -> Result<f64> {
    if dist.width() != n {
        return Err(Error::WidthMismatch { expected: n, got: dist.width() });
    }
    Ok(dist.iter().map(|(k, p)| p * staggered_shot_value(k, n)).sum())
}

pub fn staggered_magnetization_exact(state: &StateVector) -> f64 {
    let n = state.n_qubits();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * staggered_shot_value(i as u64, n))
        .sum()
}

/// `(1/K) Σ |estimate_k − reference_k|`.
pub fn mean_absolute_error(estimates: &[f64], references: &[f64]) -> Result<f64> {
    if estimates.len() != references.len() {
        return Err(Error::LengthMismatch(estimates.len(), references.len()));
    }
    if estimates.is_empty() {
        return Err(Error::InvalidParameter("no values to compare".into()));
    }
    let sum: f64 = estimates.iter().zip(references).map(|(e, r)| (e - r).abs()).sum();
    Ok(sum / estimates.len() as f64)
}

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub step: usize,
    pub time: f64,
    pub raw: f64,
    pub mitigated: f64,
    pub std_error: f64,
    pub reference: Option<f64>,
}

impl ResultRow {
    pub fn abs_error(&self) -> Option<f64> {
        self.reference.map(|r| (self.mitigated - r).abs())
    }
}

pub const RESULTS_CSV_HEADER: &str = "step,time,raw,mitigated,std_error,reference,abs_error";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.10}")).unwrap_or_default()
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(RESULTS_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.6},{:.10},{:.10},{:.10},{},{}",
            r.step,
            r.time,
            r.raw,
            r.mitigated,
            r.std_error,
            opt(r.reference),
            opt(r.abs_error())
        );
    }
    s
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.trim() == RESULTS_CSV_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: "missing results header".into() }),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let bad = |what: &str| Error::Parse { line: line_no, message: format!("bad {what}") };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 7 {
            return Err(Error::Parse { line: line_no, message: format!("expected 7 fields, got {}", f.len()) });
        }
        let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
        rows.push(ResultRow {
            step: f[0].parse().map_err(|_| bad("step"))?,
            time: num(f[1], "time")?,
            raw: num(f[2], "raw")?,
            mitigated: num(f[3], "mitigated")?,
            std_error: num(f[4], "std_error")?,
            reference: if f[5].is_empty() { None } else { Some(num(f[5], "reference")?) },
        });
    }
    Ok(rows)
}
