//! The five error-mitigation methods as circuit transforms and
//! post-processors, plus the per-step pipeline that composes them.

mod dd;
mod pipeline;
mod sm;
mod trex;
mod twirl;
mod zne;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use dd::{dd_insert, DdSpec};
pub(crate) use pipeline::execute_level;
pub use pipeline::{run_mitigated_experiment, run_mitigated_experiment_with, RunOptions, StepReport};
pub use sm::{sm_mitigate, sm_mitigate_with_errors, SM_DEAD_ZONE, SM_P_MAX};
pub use trex::{trex_collapse, trex_expand};
pub use twirl::{pauli_twirl, TwirlEntry, TwirlTable};
pub use zne::{zne_extrapolate, zne_fold, ZneFit, ZnePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrexConfig {
    pub enabled: bool,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdConfig {
    pub enabled: bool,
    pub spec: DdSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtConfig {
    pub enabled: bool,
    pub n_copies: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZneConfig {
    pub enabled: bool,
    pub fold_factors: Vec<usize>,
    pub fit: ZneFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmConfig {
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationConfig {
    pub trex: TrexConfig,
    pub dd: DdConfig,
    pub pt: PtConfig,
    pub zne: ZneConfig,
    pub sm: SmConfig,
}

impl Default for MitigationConfig {
    /// Everything disabled, with the default sampling parameters in place.
    fn default() -> Self {
        MitigationConfig {
            trex: TrexConfig { enabled: false, n_samples: 10 },
            dd: DdConfig { enabled: false, spec: DdSpec::default() },
            pt: PtConfig { enabled: false, n_copies: 10 },
            zne: ZneConfig { enabled: false, fold_factors: vec![1, 3, 5], fit: ZneFit::Linear },
            sm: SmConfig { enabled: false },
        }
    }
}

/// The configurations compared in the magnetization sweep.
pub const SWEEP_PRESETS: [&str; 5] = ["NOQEM", "TREX", "TREX+DD", "TREX+PT", "TREX+DD+PT"];

impl MitigationConfig {
    pub fn none() -> MitigationConfig {
        MitigationConfig::default()
    }

    /// Parses `NOQEM` or a `+`-joined list of `TREX`, `DD`, `PT`, `ZNE`, `SM`.
    pub fn preset(name: &str) -> Result<MitigationConfig> {
        let mut c = MitigationConfig::default();
        let name = name.trim();
        if name.eq_ignore_ascii_case("NOQEM") {
            return Ok(c);
        }
        for part in name.split('+') {
            match part.trim().to_ascii_uppercase().as_str() {
                "TREX" => c.trex.enabled = true,
                "DD" => c.dd.enabled = true,
                "PT" => c.pt.enabled = true,
                "ZNE" => c.zne.enabled = true,
                "SM" => c.sm.enabled = true,
                other => return Err(Error::InvalidParameter(format!("unknown mitigation method `{other}`"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// `NOQEM` or the enabled methods joined by `+`.
    pub fn label(&self) -> String {
        let parts: Vec<&str> = [
            (self.trex.enabled, "TREX"),
            (self.dd.enabled, "DD"),
            (self.pt.enabled, "PT"),
            (self.zne.enabled, "ZNE"),
            (self.sm.enabled, "SM"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect();
        if parts.is_empty() {
            "NOQEM".into()
        } else {
            parts.join("+")
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trex.n_samples < 1 || self.pt.n_copies < 1 {
            return Err(Error::InvalidParameter("TREX samples and PT copies must be at least 1".into()));
        }
        let f = &self.zne.fold_factors;
        if f.first() != Some(&1) {
            return Err(Error::InvalidParameter("fold factors must start at 1".into()));
        }
        if f.iter().any(|x| x % 2 == 0) || f.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("fold factors must be odd and strictly increasing".into()));
        }
        if self.zne.enabled && f.len() < 2 {
            return Err(Error::InvalidParameter("ZNE needs at least two fold factors".into()));
        }
        self.dd.spec.validate()
    }

    /// Sets one `key = value` entry of a `[mitigation]` section.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let flag = || match v {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            _ => Err(Error::InvalidParameter(format!("`{key}`: expected a boolean, got `{v}`"))),
        };
        let count = || {
            v.parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("`{key}`: expected a count, got `{v}`")))
        };
        match key {
            "preset" => *self = MitigationConfig::preset(v)?,
            "trex" => self.trex.enabled = flag()?,
            "trex.n_samples" => self.trex.n_samples = count()?,
            "dd" => self.dd.enabled = flag()?,
            "dd.pulse_width" => {
                self.dd.spec.pulse_width = v
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("`{key}`: bad number `{v}`")))?
            }
            "pt" => self.pt.enabled = flag()?,
            "pt.n_copies" => self.pt.n_copies = count()?,
            "zne" => self.zne.enabled = flag()?,
            "zne.fold_factors" => {
                self.zne.fold_factors = v
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidParameter(format!("`{key}`: bad factor list `{v}`")))?
            }
            "zne.fit" => self.zne.fit = v.parse()?,
            "sm" => self.sm.enabled = flag()?,
            other => return Err(Error::InvalidParameter(format!("unknown mitigation key `{other}`"))),
        }
        self.validate()
    }
}

/// Intermediate values kept for reports.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MethodBreakdown {
    pub zne_points: Vec<ZnePoint>,
    pub zne_fit: Option<ZneFit>,
    pub zne_linear: Option<f64>,
    pub zne_exponential: Option<f64>,
    pub sm_p: Option<f64>,
    pub sm_test_raw: Option<f64>,
    pub sm_test_ideal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigatedEstimate {
    pub raw: f64,
    pub mitigated: f64,
    pub std_error: f64,
    pub breakdown: MethodBreakdown,
    /// Machine-readable notes such as `sm_dead_zone` or `zne_exp_fallback`.
    pub flags: Vec<String>,
}

impl MitigatedEstimate {
    pub fn unmitigated(raw: f64, std_error: f64) -> MitigatedEstimate {
        MitigatedEstimate {
            raw,
            mitigated: raw,
            std_error,
            breakdown: MethodBreakdown::default(),
            flags: Vec::new(),
        }
    }
}
