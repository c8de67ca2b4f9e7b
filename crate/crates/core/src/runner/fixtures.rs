use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::Boundary;
use crate::observables::{mean_absolute_error, ResultRow};
use crate::{Error, Result};

const HARDWARE_N20: &str = include_str!("../../fixtures/hardware_n20.csv");
const HARDWARE_LARGE: &str = include_str!("../../fixtures/hardware_large.csv");
const REFERENCE_N20: &str = include_str!("../../fixtures/reference_n20.csv");
const CIRCUIT_RESOURCES: &str = include_str!("../../fixtures/circuit_resources.csv");
const MAE_SUMMARY: &str = include_str!("../../fixtures/mae_summary.csv");

/// Names accepted by [`FixtureTable::bundled`].
pub const BUNDLED_SERIES_TABLES: [&str; 3] = ["hardware_n20", "hardware_large", "reference_n20"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixturePoint {
    pub step: usize,
    pub value: f64,
    pub std_dev: f64,
}

/// Named `(step, value, std_dev)` series, stored as
/// `series,step,value,std_dev` CSV with `#` comment lines on top.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixtureTable {
    pub name: String,
    pub comments: Vec<String>,
    pub series: BTreeMap<String, Vec<FixturePoint>>,
}

const SERIES_HEADER: &str = "series,step,value,std_dev";

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(s: &str, line: usize, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad {what} `{s}`") })
}

fn parse_usize(s: &str, line: usize, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad {what} `{s}`") })
}

impl FixtureTable {
    pub fn new(name: &str) -> FixtureTable {
        FixtureTable { name: name.to_string(), ..FixtureTable::default() }
    }

    pub fn parse(name: &str, text: &str) -> Result<FixtureTable> {
        let mut table = FixtureTable::new(name);
        table.comments = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| l.trim_start_matches('#').trim().to_string())
            .collect();
        let mut lines = data_lines(text);
        match lines.next() {
            Some((_, h)) if h == SERIES_HEADER => {}
            other => {
                let line = other.map_or(1, |(l, _)| l);
                return Err(Error::Parse { line, message: format!("expected header `{SERIES_HEADER}`") });
            }
        }
        for (line, l) in lines {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 4 {
                return Err(Error::Parse { line, message: format!("expected 4 fields, got {}", f.len()) });
            }
            let p = FixturePoint {
                step: parse_usize(f[1], line, "step")?,
                value: parse_f64(f[2], line, "value")?,
                std_dev: parse_f64(f[3], line, "std_dev")?,
            };
            table.series.entry(f[0].trim().to_string()).or_default().push(p);
        }
        table.validate()?;
        Ok(table)
    }

    /// Every series covers steps `1..=len` in order and has `std_dev ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        for (name, pts) in &self.series {
            for (i, p) in pts.iter().enumerate() {
                if p.step != i + 1 {
                    return Err(Error::InvalidParameter(format!(
                        "series `{name}`: expected step {}, found {}",
                        i + 1,
                        p.step
                    )));
                }
                if !(p.std_dev >= 0.0) || !p.value.is_finite() {
                    return Err(Error::InvalidParameter(format!("series `{name}` step {}: bad value", p.step)));
                }
            }
        }
        Ok(())
    }

    pub fn bundled(name: &str) -> Result<FixtureTable> {
        let text = match name {
            "hardware_n20" => HARDWARE_N20,
            "hardware_large" => HARDWARE_LARGE,
            "reference_n20" => REFERENCE_N20,
            other => return Err(Error::InvalidParameter(format!("no bundled fixture `{other}`"))),
        };
        FixtureTable::parse(name, text)
    }

    pub fn get(&self, series: &str) -> Result<&[FixturePoint]> {
        self.series
            .get(series)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidParameter(format!("fixture `{}` has no series `{series}`", self.name)))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{SERIES_HEADER}");
        for (name, pts) in &self.series {
            for p in pts {
                let _ = writeln!(s, "{name},{},{},{}", p.step, p.value, p.std_dev);
            }
        }
        s
    }
}

/// Looks up `table:series`, e.g. `reference_n20:OBC`.
pub fn bundled_series(spec: &str) -> Result<Vec<FixturePoint>> {
    let (table, series) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameter(format!("expected `table:series`, got `{spec}`")))?;
    Ok(FixtureTable::bundled(table)?.get(series)?.to_vec())
}

/// One row of the circuit-resources table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceRow {
    pub boundary: Boundary,
    pub n_qubits: usize,
    pub steps: usize,
    pub depth: usize,
    pub cx: usize,
}

pub fn bundled_resources() -> Result<Vec<ResourceRow>> {
    let mut lines = data_lines(CIRCUIT_RESOURCES);
    lines.next();
    lines
        .map(|(line, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                return Err(Error::Parse { line, message: "expected 5 fields".into() });
            }
            Ok(ResourceRow {
                boundary: f[0].parse()?,
                n_qubits: parse_usize(f[1], line, "n_qubits")?,
                steps: parse_usize(f[2], line, "steps")?,
                depth: parse_usize(f[3], line, "depth")?,
                cx: parse_usize(f[4], line, "cx")?,
            })
        })
        .collect()
}

/// One bundled mean-absolute-error cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MaeCell {
    pub method: String,
    pub boundary: Boundary,
    pub n_qubits: usize,
    pub mae: f64,
}

pub fn bundled_mae_summary() -> Result<Vec<MaeCell>> {
    let mut lines = data_lines(MAE_SUMMARY);
    lines.next();
    lines
        .map(|(line, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 4 {
                return Err(Error::Parse { line, message: "expected 4 fields".into() });
            }
            Ok(MaeCell {
                method: f[0].to_string(),
                boundary: f[1].parse()?,
                n_qubits: parse_usize(f[2], line, "n_qubits")?,
                mae: parse_f64(f[3], line, "mae")?,
            })
        })
        .collect()
}

/// Per-step comparison of a series against a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaeReport {
    pub label: String,
    /// `(step, value, reference, |value − reference|)`.
    pub rows: Vec<(usize, f64, f64, f64)>,
    pub mae: f64,
}

impl MaeReport {
    pub fn to_text(&self) -> String {
        let mut s = String::from("step,value,reference,abs_diff\n");
        for (step, v, r, d) in &self.rows {
            let _ = writeln!(s, "{step},{v:.6},{r:.6},{d:.6}");
        }
        let _ = writeln!(s, "{:<20} {:.5}", self.label, self.mae);
        s
    }
}

/// MAE of `values` against `reference`; both must list the same steps in
/// the same order.
pub fn compare_fixture(label: &str, values: &[FixturePoint], reference: &[FixturePoint]) -> Result<MaeReport> {
    if values.len() != reference.len() {
        return Err(Error::LengthMismatch(values.len(), reference.len()));
    }
    if let Some((v, r)) = values.iter().zip(reference).find(|(v, r)| v.step != r.step) {
        return Err(Error::InvalidParameter(format!(
            "misaligned steps: {} against reference step {}",
            v.step, r.step
        )));
    }
    let est: Vec<f64> = values.iter().map(|p| p.value).collect();
    let refs: Vec<f64> = reference.iter().map(|p| p.value).collect();
    let mae = mean_absolute_error(&est, &refs)?;
    Ok(MaeReport {
        label: label.to_string(),
        rows: values
            .iter()
            .zip(reference)
            .map(|(v, r)| (v.step, v.value, r.value, (v.value - r.value).abs()))
            .collect(),
        mae,
    })
}

/// The `mitigated` column of a results file as a series.
pub fn series_from_results(rows: &[ResultRow]) -> Vec<FixturePoint> {
    rows.iter()
        .map(|r| FixturePoint { step: r.step, value: r.mitigated, std_dev: r.std_error })
        .collect()
}

/// One reproduced cell of the bundled MAE summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MaeReproduction {
    pub expected: MaeCell,
    /// `None` when no per-step data for the cell is bundled.
    pub computed: Option<MaeReport>,
    pub reference: String,
}

impl MaeReproduction {
    pub fn difference(&self) -> Option<f64> {
        self.computed.as_ref().map(|c| (c.mae - self.expected.mae).abs())
    }
}

fn boundary_label(b: Boundary) -> &'static str {
    match b {
        Boundary::Open => "OBC",
        Boundary::Periodic => "PBC",
    }
}

/// Recomputes every bundled MAE cell for which per-step hardware data is
/// bundled. N=20 cells are compared against the regenerated N=20 reference;
/// the larger chains have no bundled reference of their own, so their cells
/// use the N=20 series of the same boundary as a stand-in.
pub fn reproduce_mae_summary() -> Result<Vec<MaeReproduction>> {
    let small = FixtureTable::bundled("hardware_n20")?;
    let large = FixtureTable::bundled("hardware_large")?;
    let reference = FixtureTable::bundled("reference_n20")?;
    bundled_mae_summary()?
        .into_iter()
        .map(|cell| {
            let b = boundary_label(cell.boundary);
            let data = if cell.n_qubits == 20 {
                small.series.get(&format!("{b}/{}", cell.method))
            } else {
                large.series.get(&format!("{b}-{}/{}", cell.n_qubits, cell.method))
            };
            let ref_name = format!("reference_n20:{b}");
            let computed = match data {
                Some(d) => Some(compare_fixture(
                    &format!("{} {b} N={}", cell.method, cell.n_qubits),
                    d,
                    reference.get(b)?,
                )?),
                None => None,
            };
            Ok(MaeReproduction { expected: cell, computed, reference: ref_name })
        })
        .collect()
}

/// Table-shaped text of [`reproduce_mae_summary`].
pub fn mae_reproduction_text(cells: &[MaeReproduction]) -> String {
    let mut s = String::from("method,boundary,n_qubits,expected,computed,abs_diff\n");
    for c in cells {
        let p = &c.expected;
        let (computed, diff) = match (&c.computed, c.difference()) {
            (Some(r), Some(d)) => (format!("{:.5}", r.mae), format!("{d:.5}")),
            _ => ("no-data".into(), String::new()),
        };
        let _ = writeln!(s, "{},{},{},{:.5},{computed},{diff}", p.method, p.boundary, p.n_qubits, p.mae);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_parse() {
        for name in BUNDLED_SERIES_TABLES {
            let t = FixtureTable::bundled(name).unwrap();
            assert!(t.series.values().all(|s| s.len() == 10), "{name}");
        }
        assert_eq!(bundled_resources().unwrap().len(), 40);
        assert_eq!(bundled_mae_summary().unwrap().len(), 20);
    }

    #[test]
    fn self_comparison_is_zero() {
        let t = FixtureTable::bundled("hardware_n20").unwrap();
        let s = t.get("OBC/NOQEM").unwrap();
        assert_eq!(compare_fixture("self", s, s).unwrap().mae, 0.0);
    }

    #[test]
    fn constant_offset() {
        let r: Vec<FixturePoint> =
            (1..=10).map(|k| FixturePoint { step: k, value: (k as f64).sin(), std_dev: 0.0 }).collect();
        let v: Vec<FixturePoint> = r.iter().map(|p| FixturePoint { value: p.value + 0.03, ..*p }).collect();
        assert!((compare_fixture("offset", &v, &r).unwrap().mae - 0.03).abs() < 1e-12);
    }

    #[test]
    fn misaligned_steps_are_rejected() {
        let r = vec![FixturePoint { step: 1, value: 0.0, std_dev: 0.0 }];
        let v = vec![FixturePoint { step: 2, value: 0.0, std_dev: 0.0 }];
        assert!(compare_fixture("x", &v, &r).is_err());
        assert!(compare_fixture("x", &[], &r).is_err());
    }

    #[test]
    fn parse_diagnostics() {
        assert!(matches!(FixtureTable::parse("x", "a,b\n"), Err(Error::Parse { line: 1, .. })));
        let bad = "series,step,value,std_dev\nA,1,0.1,0.0\nA,2,zz,0.0\n";
        assert!(matches!(FixtureTable::parse("x", bad), Err(Error::Parse { line: 3, .. })));
        let gap = "series,step,value,std_dev\nA,1,0.1,0.0\nA,3,0.1,0.0\n";
        assert!(FixtureTable::parse("x", gap).is_err());
        let neg = "series,step,value,std_dev\nA,1,0.1,-1\n";
        assert!(FixtureTable::parse("x", neg).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = FixtureTable::bundled("hardware_large").unwrap();
        assert_eq!(FixtureTable::parse(&t.name, &t.to_csv()).unwrap(), t);
    }
}
