use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::mitigation::MitigationConfig;
use crate::model::{Boundary, TrotterOrder, XXZParams};
use crate::noise::NoiseModel;
use crate::{Error, Result};

/// Sectioned `key = value` text. Keys are addressed as `section.key`; keys
/// before the first section header live in the `""` section.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IniDocument {
    /// `section.key -> (value, line)`.
    entries: BTreeMap<String, (String, usize)>,
}

impl IniDocument {
    pub fn parse(text: &str) -> Result<IniDocument> {
        let mut doc = IniDocument::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split(['#', ';']).next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            if let Some(rest) = l.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse { line, message: "unterminated section header".into() })?;
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected `key = value`, got `{l}`") })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Parse { line, message: "empty key".into() });
            }
            let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            if let Some((_, first)) = doc.entries.insert(key.clone(), (v.trim().to_string(), line)) {
                return Err(Error::Parse { line, message: format!("`{key}` already set on line {first}") });
            }
        }
        Ok(doc)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, l)| *l)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    /// Entries of one section as `(key, value, line)` with the prefix removed.
    pub fn section<'a>(&'a self, name: &'a str) -> impl Iterator<Item = (&'a str, &'a str, usize)> + 'a {
        let prefix = format!("{name}.");
        self.entries.iter().filter_map(move |(k, (v, l))| {
            k.strip_prefix(prefix.as_str()).map(|rest| (rest, v.as_str(), *l))
        })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse { line: *line, message: format!("bad value `{v}` for `{key}`") }),
        }
    }
}

/// Attaches the line of `key` to errors raised while applying it.
fn at_line(doc: &IniDocument, key: &str, e: Error) -> Error {
    match (e, doc.line_of(key)) {
        (Error::InvalidParameter(m), Some(line)) => Error::Parse { line, message: m },
        (e, _) => e,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workload {
    Magnetization,
    Entropy,
    SweepQem,
}

impl FromStr for Workload {
    type Err = Error;
    fn from_str(s: &str) -> Result<Workload> {
        match s.to_ascii_lowercase().as_str() {
            "magnetization" => Ok(Workload::Magnetization),
            "entropy" => Ok(Workload::Entropy),
            "sweep" | "sweepqem" | "sweep_qem" => Ok(Workload::SweepQem),
            other => Err(Error::InvalidParameter(format!("unknown workload `{other}`"))),
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Workload::Magnetization => "magnetization",
            Workload::Entropy => "entropy",
            Workload::SweepQem => "sweep",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropySettings {
    pub subsystem: Vec<usize>,
    pub n_instances: usize,
    pub unbiased: bool,
    /// Steps at which the entropy is estimated; empty means `1..=M`.
    pub steps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub workload: Workload,
    pub params: XXZParams,
    pub order: TrotterOrder,
    pub noise: NoiseModel,
    pub mitigation: MitigationConfig,
    pub shots: u64,
    pub repetitions: usize,
    pub trajectories: u64,
    pub seed: u64,
    pub entropy: EntropySettings,
    pub out_dir: PathBuf,
}

fn parse_list(v: &str, line: usize, key: &str) -> Result<Vec<usize>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse { line, message: format!("bad index `{s}` in `{key}`") })
        })
        .collect()
}

impl ExperimentConfig {
    /// Required keys: `model.n_qubits` and `model.steps`. The CLI subcommand
    /// overrides `experiment.workload`.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let doc = IniDocument::parse(text)?;
        let known_sections = ["experiment", "model", "noise", "mitigation", "entropy", "output"];
        for k in doc.keys() {
            let section = k.split_once('.').map_or("", |(s, _)| s);
            if !known_sections.contains(&section) {
                let line = doc.line_of(k).unwrap_or(0);
                return Err(Error::Parse { line, message: format!("unknown key `{k}`") });
            }
        }
        let workload: Workload = match doc.get("experiment.workload") {
            Some(v) => v.parse().map_err(|e| at_line(&doc, "experiment.workload", e))?,
            None => Workload::Magnetization,
        };
        let n: usize = doc.parsed("model.n_qubits")?.ok_or_else(|| Error::MissingKey("model.n_qubits".into()))?;
        let steps: usize = doc.parsed("model.steps")?.ok_or_else(|| Error::MissingKey("model.steps".into()))?;
        let delta = doc.parsed("model.delta")?.unwrap_or(1.0);
        let dt = doc.parsed("model.dt")?.unwrap_or(0.5);
        let boundary: Boundary = match doc.get("model.boundary") {
            Some(v) => v.parse().map_err(|e| at_line(&doc, "model.boundary", e))?,
            None => Boundary::Open,
        };
        let mut params = XXZParams::new(n, delta, dt, steps, boundary);
        if let Some(j1) = doc.parsed("model.j1")? {
            params.j1 = j1;
        }
        params.validate().map_err(|e| at_line(&doc, "model.n_qubits", e))?;
        let order: TrotterOrder = match doc.get("model.order") {
            Some(v) => v.parse().map_err(|e| at_line(&doc, "model.order", e))?,
            None => TrotterOrder::SecondOptimized,
        };
        for (k, _, line) in doc.section("model") {
            if !["n_qubits", "steps", "delta", "dt", "boundary", "j1", "order"].contains(&k) {
                return Err(Error::Parse { line, message: format!("unknown key `model.{k}`") });
            }
        }

        let mut noise = match doc.get("noise.preset") {
            None | Some("ideal") => NoiseModel::ideal(),
            Some("device") => NoiseModel::default_device(),
            Some(other) => {
                return Err(at_line(&doc, "noise.preset", Error::InvalidParameter(format!("unknown noise preset `{other}`"))))
            }
        };
        for (k, v, _) in doc.section("noise") {
            if k != "preset" {
                noise.set(k, v).map_err(|e| at_line(&doc, &format!("noise.{k}"), e))?;
            }
        }

        let mut mitigation = match doc.get("mitigation.preset") {
            Some(p) => MitigationConfig::preset(p).map_err(|e| at_line(&doc, "mitigation.preset", e))?,
            None => MitigationConfig::none(),
        };
        for (k, v, _) in doc.section("mitigation") {
            if k != "preset" {
                mitigation.set(k, v).map_err(|e| at_line(&doc, &format!("mitigation.{k}"), e))?;
            }
        }

        for (k, _, line) in doc.section("experiment") {
            if !["workload", "shots", "repetitions", "trajectories", "seed"].contains(&k) {
                return Err(Error::Parse { line, message: format!("unknown key `experiment.{k}`") });
            }
        }
        let shots = doc.parsed("experiment.shots")?.unwrap_or(100_000u64);
        let repetitions = doc.parsed("experiment.repetitions")?.unwrap_or(10usize);
        let trajectories = doc.parsed("experiment.trajectories")?.unwrap_or(10u64);
        let seed = doc.parsed("experiment.seed")?.unwrap_or(0u64);
        if repetitions < 1 {
            return Err(at_line(&doc, "experiment.repetitions", Error::InvalidParameter("repetitions must be at least 1".into())));
        }
        if shots < 1 || trajectories < 1 {
            return Err(at_line(&doc, "experiment.shots", Error::InvalidParameter("shots and trajectories must be positive".into())));
        }

        for (k, _, line) in doc.section("entropy") {
            if !["subsystem", "n_instances", "unbiased", "steps"].contains(&k) {
                return Err(Error::Parse { line, message: format!("unknown key `entropy.{k}`") });
            }
        }
        let subsystem = match doc.get("entropy.subsystem") {
            Some(v) => parse_list(v, doc.line_of("entropy.subsystem").unwrap_or(0), "entropy.subsystem")?,
            None => (0..n / 2).collect(),
        };
        let entropy = EntropySettings {
            subsystem,
            n_instances: doc.parsed("entropy.n_instances")?.unwrap_or(60),
            unbiased: doc.parsed("entropy.unbiased")?.unwrap_or(false),
            steps: match doc.get("entropy.steps") {
                Some(v) => parse_list(v, doc.line_of("entropy.steps").unwrap_or(0), "entropy.steps")?,
                None => Vec::new(),
            },
        };
        if let Some(&s) = entropy.steps.iter().find(|&&s| s == 0 || s > steps) {
            return Err(at_line(&doc, "entropy.steps", Error::InvalidParameter(format!("entropy step {s} outside 1..={steps}"))));
        }

        for (k, _, line) in doc.section("output") {
            if k != "dir" {
                return Err(Error::Parse { line, message: format!("unknown key `output.{k}`") });
            }
        }
        let out_dir = PathBuf::from(doc.get("output.dir").unwrap_or("results"));

        Ok(ExperimentConfig {
            workload,
            params,
            order,
            noise,
            mitigation,
            shots,
            repetitions,
            trajectories,
            seed,
            entropy,
            out_dir,
        })
    }

    pub fn from_path(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        ExperimentConfig::parse(&text)
    }

    /// Fully resolved configuration, every key explicit, in a fixed order.
    pub fn to_ini(&self) -> String {
        let p = &self.params;
        let m = &self.mitigation;
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        s += &format!(
            "[experiment]\nworkload = {}\nshots = {}\nrepetitions = {}\ntrajectories = {}\nseed = {}\n\n",
            self.workload, self.shots, self.repetitions, self.trajectories, self.seed
        );
        s += &format!(
            "[model]\nn_qubits = {}\nsteps = {}\ndelta = {}\ndt = {}\nj1 = {}\nboundary = {}\norder = {}\n\n",
            p.n_qubits,
            p.n_steps,
            p.delta,
            p.dt,
            p.j1,
            p.boundary,
            match self.order {
                TrotterOrder::First => "first",
                TrotterOrder::SecondOptimized => "second",
            }
        );
        s += "[noise]\n";
        s += &self.noise.to_key_values();
        s += "\n[mitigation]\n";
        s += &format!(
            "trex = {}\ntrex.n_samples = {}\ndd = {}\ndd.pulse_width = {}\npt = {}\npt.n_copies = {}\nzne = {}\nzne.fold_factors = {}\nzne.fit = {}\nsm = {}\n\n",
            m.trex.enabled,
            m.trex.n_samples,
            m.dd.enabled,
            m.dd.spec.pulse_width,
            m.pt.enabled,
            m.pt.n_copies,
            m.zne.enabled,
            list(&m.zne.fold_factors),
            m.zne.fit,
            m.sm.enabled
        );
        s += &format!(
            "[entropy]\nsubsystem = {}\nn_instances = {}\nunbiased = {}\nsteps = {}\n\n",
            list(&self.entropy.subsystem),
            self.entropy.n_instances,
            self.entropy.unbiased,
            list(&self.entropy.steps)
        );
        s += &format!("[output]\ndir = {}\n", self.out_dir.display());
        s
    }

    /// SHA-256 of the resolved configuration (output directory excluded).
    pub fn hash(&self) -> String {
        let body: String = self
            .to_ini()
            .lines()
            .filter(|l| !l.starts_with("dir = "))
            .map(|l| format!("{l}\n"))
            .collect();
        let digest = Sha256::digest(body.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[experiment]\nworkload = magnetization\n[model]\nn_qubits = 4\nsteps = 2\n";

    #[test]
    fn defaults() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.repetitions, 10);
        assert_eq!(c.shots, 100_000);
        assert_eq!(c.params.dt, 0.5);
        assert_eq!(c.order, TrotterOrder::SecondOptimized);
        assert!(c.noise.is_ideal());
        assert_eq!(c.mitigation.label(), "NOQEM");
        assert_eq!(c.entropy.subsystem, vec![0, 1]);
    }

    #[test]
    fn missing_key_is_named() {
        let e = ExperimentConfig::parse("[experiment]\nworkload = entropy\n[model]\nsteps = 2\n").unwrap_err();
        assert_eq!(e, Error::MissingKey("model.n_qubits".into()));
        assert!(e.to_string().contains("model.n_qubits"));
        let e = ExperimentConfig::parse("[model]\nn_qubits = 4\n").unwrap_err();
        assert_eq!(e, Error::MissingKey("model.steps".into()));
    }

    #[test]
    fn line_diagnostics() {
        let e = ExperimentConfig::parse(&format!("{MINIMAL}delta = abc\n")).unwrap_err();
        assert_eq!(e, Error::Parse { line: 6, message: "bad value `abc` for `model.delta`".into() });
        let e = ExperimentConfig::parse(&format!("{MINIMAL}[mitigation]\npreset = TREX+XYZ\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 7, .. }), "{e:?}");
        let e = ExperimentConfig::parse(&format!("{MINIMAL}[noise]\nwhatever\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 7, .. }));
        let e = ExperimentConfig::parse(&format!("{MINIMAL}colour = red\n")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 6, .. }));
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = format!(
            "{MINIMAL}[noise]\npreset = device\np2 = 0.01\n[mitigation]\npreset = TREX+DD+PT\npt.n_copies = 4\n[entropy]\nsubsystem = 0,2\n"
        );
        let c = ExperimentConfig::parse(&text).unwrap();
        let again = ExperimentConfig::parse(&c.to_ini()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
        let other = ExperimentConfig::parse(&text.replace("p2 = 0.01", "p2 = 0.02")).unwrap();
        assert_ne!(c.hash(), other.hash());
    }

    #[test]
    fn zero_repetitions_rejected() {
        let text = MINIMAL.replace("workload = magnetization", "workload = magnetization\nrepetitions = 0");
        assert!(ExperimentConfig::parse(&text).is_err());
    }
}
