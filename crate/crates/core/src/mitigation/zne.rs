use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{MethodBreakdown, MitigatedEstimate};
use crate::sim::{Circuit, Layer};
use crate::{Error, Result};

/// Every two-qubit gate `G` becomes `G·(G·G)^((factor−1)/2)`. The extra
/// copies go into their own layers; single-qubit gates stay in the first.
/// CX and CZ are self-inverse, so `G† = G`.
pub fn zne_fold(circuit: &Circuit, factor: usize) -> Result<Circuit> {
    if factor.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("fold factor {factor} must be odd")));
    }
    if factor == 1 {
        return Ok(circuit.clone());
    }
    let mut layers = Vec::with_capacity(circuit.layers().len() * factor);
    for layer in circuit.layers() {
        layers.push(layer.clone());
        let two: Vec<_> = layer.gates.iter().filter(|g| g.kind.arity() == 2).cloned().collect();
        if two.is_empty() {
            continue;
        }
        for _ in 1..factor {
            layers.push(Layer::new(two.iter().map(|g| g.inverse()).collect(), layer.duration));
        }
    }
    let mut out = circuit.with_layers(layers)?;
    out.meta.insert("zne_factor".into(), factor.to_string());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZneFit {
    Linear,
    Exponential,
}

impl fmt::Display for ZneFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZneFit::Linear => "linear",
            ZneFit::Exponential => "exponential",
        })
    }
}

impl FromStr for ZneFit {
    type Err = Error;
    fn from_str(s: &str) -> Result<ZneFit> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(ZneFit::Linear),
            "exponential" | "exp" => Ok(ZneFit::Exponential),
            other => Err(Error::InvalidParameter(format!("unknown ZNE fit `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZnePoint {
    pub factor: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Weights `1/σ²`, or uniform weights when any σ is zero.
fn weights(points: &[ZnePoint]) -> Vec<f64> {
    if points.iter().all(|p| p.std_error > 0.0) {
        points.iter().map(|p| 1.0 / (p.std_error * p.std_error)).collect()
    } else {
        vec![1.0; points.len()]
    }
}

/// Solves the 2×2 normal equations `(Jᵀ W J) x = Jᵀ W r`; returns `x` and
/// the inverse normal matrix.
fn normal_solve(rows: &[[f64; 2]], w: &[f64], r: &[f64]) -> Option<([f64; 2], [[f64; 2]; 2])> {
    let mut a = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for ((j, wi), ri) in rows.iter().zip(w).zip(r) {
        for p in 0..2 {
            b[p] += wi * j[p] * ri;
            for q in 0..2 {
                a[p][q] += wi * j[p] * j[q];
            }
        }
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
    let x = [inv[0][0] * b[0] + inv[0][1] * b[1], inv[1][0] * b[0] + inv[1][1] * b[1]];
    Some((x, inv))
}

/// Intercept at factor 0 and its standard error.
fn linear(points: &[ZnePoint]) -> Result<(f64, f64)> {
    let w = weights(points);
    let rows: Vec<[f64; 2]> = points.iter().map(|p| [1.0, p.factor]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
    let (x, inv) = normal_solve(&rows, &w, &ys).ok_or_else(|| Error::EstimateFailed("singular linear fit".into()))?;
    let se = if points.iter().all(|p| p.std_error > 0.0) { inv[0][0].sqrt() } else { 0.0 };
    Ok((x[0], se))
}

/// Gauss–Newton fit of `A·e^{−bλ}`; `None` when the model does not apply.
fn exponential(points: &[ZnePoint]) -> Option<(f64, f64)> {
    let sign = points[0].value.signum();
    if points.iter().any(|p| p.value == 0.0 || p.value.signum() != sign) {
        return None;
    }
    // start from the log-linear fit
    let logs: Vec<ZnePoint> = points
        .iter()
        .map(|p| ZnePoint { factor: p.factor, value: p.value.abs().ln(), std_error: p.std_error / p.value.abs() })
        .collect();
    let (ln_a, _) = linear(&logs).ok()?;
    let w_log = weights(&logs);
    let rows: Vec<[f64; 2]> = logs.iter().map(|p| [1.0, p.factor]).collect();
    let ys: Vec<f64> = logs.iter().map(|p| p.value).collect();
    let (lx, _) = normal_solve(&rows, &w_log, &ys)?;
    let (mut a, mut b) = (sign * ln_a.exp(), -lx[1]);
    let w = weights(points);
    let mut converged = false;
    let mut inv = [[0.0; 2]; 2];
    for _ in 0..100 {
        let jac: Vec<[f64; 2]> = points
            .iter()
            .map(|p| {
                let e = (-b * p.factor).exp();
                [e, -a * p.factor * e]
            })
            .collect();
        let res: Vec<f64> = points.iter().map(|p| p.value - a * (-b * p.factor).exp()).collect();
        let (dx, i) = normal_solve(&jac, &w, &res)?;
        inv = i;
        a += dx[0];
        b += dx[1];
        if !a.is_finite() || !b.is_finite() {
            return None;
        }
        if dx[0].abs() < 1e-13 * (1.0 + a.abs()) && dx[1].abs() < 1e-13 * (1.0 + b.abs()) {
            converged = true;
            break;
        }
    }
    if !converged || b < 0.0 {
        return None;
    }
    let se = if points.iter().all(|p| p.std_error > 0.0) { inv[0][0].max(0.0).sqrt() } else { 0.0 };
    Some((a, se))
}

/// Extrapolates to zero noise. Both fits are attempted and recorded; the
/// requested one is reported, with the exponential falling back to linear
/// (flag `zne_exp_fallback`) when the values change sign, `b < 0`, or the
/// iteration does not converge.
pub fn zne_extrapolate(points: &[ZnePoint], fit: ZneFit) -> Result<MitigatedEstimate> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("ZNE needs at least two points".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].iter().any(|q| q.factor == p.factor) {
            return Err(Error::InvalidParameter(format!("duplicate fold factor {}", p.factor)));
        }
    }
    let lin = linear(points)?;
    let exp = exponential(points);
    let mut flags = Vec::new();
    let (mitigated, std_error) = match (fit, exp) {
        (ZneFit::Linear, _) => lin,
        (ZneFit::Exponential, Some(e)) => e,
        (ZneFit::Exponential, None) => {
            flags.push("zne_exp_fallback".to_string());
            lin
        }
    };
    let base = points.iter().min_by(|a, b| a.factor.total_cmp(&b.factor)).expect("non-empty");
    Ok(MitigatedEstimate {
        raw: base.value,
        mitigated,
        std_error,
        breakdown: MethodBreakdown {
            zne_points: points.to_vec(),
            zne_fit: Some(fit),
            zne_linear: Some(lin.0),
            zne_exponential: exp.map(|e| e.0),
            ..MethodBreakdown::default()
        },
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{apply_circuit, phase_distance, Gate, StateVector};

    fn pts(v: &[(f64, f64)]) -> Vec<ZnePoint> {
        v.iter().map(|&(factor, value)| ZnePoint { factor, value, std_error: 0.0 }).collect()
    }

    #[test]
    fn exact_line() {
        let e = zne_extrapolate(&pts(&[(1.0, 0.8), (3.0, 0.4), (5.0, 0.0)]), ZneFit::Linear).unwrap();
        assert!((e.mitigated - 1.0).abs() < 1e-12);
        assert_eq!(e.raw, 0.8);
    }

    #[test]
    fn constant_data() {
        for fit in [ZneFit::Linear, ZneFit::Exponential] {
            let e = zne_extrapolate(&pts(&[(1.0, 0.3), (3.0, 0.3), (5.0, 0.3)]), fit).unwrap();
            assert!((e.mitigated - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_recovers_depolarizing_decay() {
        let y = |l: f64| 0.7 * 0.9f64.powf(l);
        let p = pts(&[(1.0, y(1.0)), (3.0, y(3.0)), (5.0, y(5.0))]);
        let e = zne_extrapolate(&p, ZneFit::Exponential).unwrap();
        assert!((e.mitigated - 0.7).abs() < 1e-6);
        let lin = e.breakdown.zne_linear.unwrap();
        assert!(lin < 0.7 && (lin - 0.7).abs() > 1e-3);
        assert!(e.flags.is_empty());
    }

    #[test]
    fn sign_change_falls_back() {
        let e = zne_extrapolate(&pts(&[(1.0, 0.2), (3.0, -0.1), (5.0, -0.3)]), ZneFit::Exponential).unwrap();
        assert_eq!(e.flags, vec!["zne_exp_fallback".to_string()]);
        assert_eq!(Some(e.mitigated), e.breakdown.zne_linear);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(zne_extrapolate(&pts(&[(1.0, 0.2)]), ZneFit::Linear).is_err());
        assert!(zne_extrapolate(&pts(&[(1.0, 0.2), (1.0, 0.3)]), ZneFit::Linear).is_err());
    }

    #[test]
    fn weighted_errors_propagate() {
        let p: Vec<ZnePoint> = [(1.0, 0.5), (3.0, 0.3), (5.0, 0.1)]
            .iter()
            .map(|&(factor, value)| ZnePoint { factor, value, std_error: 0.01 })
            .collect();
        let e = zne_extrapolate(&p, ZneFit::Linear).unwrap();
        // Var(intercept) = σ² Σλ² / (n Σλ² − (Σλ)²) = 1e-4 · 35 / 24
        assert!((e.std_error - (1e-4 * 35.0 / 24.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn folding_triples_cx_and_keeps_state() {
        let mut c = Circuit::new(3);
        c.push(vec![Gate::h(0), Gate::sx(2)]).unwrap();
        c.push(vec![Gate::cx(0, 1), Gate::rz(2, 0.4)]).unwrap();
        c.push(vec![Gate::cz(1, 2)]).unwrap();
        assert_eq!(zne_fold(&c, 1).unwrap(), c);
        assert!(zne_fold(&c, 2).is_err());
        let f3 = zne_fold(&c, 3).unwrap();
        assert_eq!(f3.cx_count(), 3 * c.cx_count());
        assert_eq!(f3.two_qubit_count(), 3 * c.two_qubit_count());
        assert_eq!(f3.gate_count() - f3.two_qubit_count(), c.gate_count() - c.two_qubit_count());
        let s = StateVector::basis(3, 0b011);
        let a = apply_circuit(s.clone(), &c).unwrap();
        let b = apply_circuit(s, &zne_fold(&c, 5).unwrap()).unwrap();
        assert!(phase_distance(&a, &b) < 1e-12);
    }
}
