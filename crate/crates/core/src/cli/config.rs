//! Experiment files: one self-contained JSON or TOML document.
//!
//! ```toml
//! schema = "gwc.experiment.v1"
//! name = "critical-ising"
//! seed = 7
//! samples = 10000
//! depths = [40, 50, 63, 80, 100, 126, 159, 200]
//! observable = "connection"
//!
//! [offspring]
//! kind = "geometric"
//! p = 0.8333333333333334
//!
//! [kernel]
//! kind = "rcm"
//! q = 2.0
//!
//! [schedule]
//! schedule = "rcm_beta"
//! rule = "critical_fraction"
//! factor = 1.0
//!
//! [[checks]]
//! check = "slope"
//! scale = "log_log"
//! target = -0.5
//! tol = 0.1
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::{critical_constant, near_critical_constant};
use crate::concave::RecursionFunction;
use crate::error::{Error, Result};
use crate::montecarlo::{
    Column, Engine, ExperimentConfig, Normalizer, Observable, DEFAULT_POOL_SIZE,
};
use crate::offspring::OffspringSpec;
use crate::tree::{RSchedule, DEFAULT_NODE_BUDGET};
use crate::montecarlo::stats::Scale;

/// Value of the `schema` key accepted by this version.
pub const SCHEMA: &str = "gwc.experiment.v1";

/// Kernel family. The `β` of a random cluster kernel may be left out when the
/// schedule supplies `β_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Conductance { s: f64 },
    Rcm { q: f64, beta: Option<f64> },
}

/// A verdict requested by the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    /// Fitted slope of `log column` against `log n` or `n` equals `target ± tol`.
    Slope {
        #[serde(default = "default_column")]
        column: Column,
        scale: Scale,
        target: f64,
        tol: f64,
    },
    /// Tightness of the normalized ratio columns.
    Tightness {
        #[serde(default = "default_band")]
        band_factor: f64,
        #[serde(default = "default_drift")]
        drift_factor: f64,
    },
    /// `mean · n^(1/s)` (critical) or `mean / (β_n - β_c)^(1/s)` (near
    /// critical) moves toward the predicted constant at every step and is
    /// within `rel_tol` of it at the last grid point.
    Constant { constant: ConstantKind, rel_tol: f64 },
    /// `mean ≤ a_n^(-1/s) + 3 stderr` at every depth.
    UpperBound,
    /// `corr(B_n, W_n) ≥ floor` at the last depth.
    CorrFloor { floor: f64 },
    /// `max/min` of `norm_ratio_q50` over the top half of the grid `≤ factor`.
    Band { factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    Critical,
    NearCritical,
}

fn default_column() -> Column {
    Column::Median
}

fn default_band() -> f64 {
    crate::montecarlo::stats::DEFAULT_BAND_FACTOR
}

fn default_drift() -> f64 {
    crate::montecarlo::stats::DEFAULT_DRIFT_FACTOR
}

fn default_true() -> bool {
    true
}

/// Parsed experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub schema: String,
    pub name: String,
    pub seed: u64,
    pub samples: usize,
    pub depths: Vec<usize>,
    pub offspring: OffspringSpec,
    pub kernel: KernelSpec,
    pub schedule: RSchedule,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub pool_size: Option<usize>,
    #[serde(default)]
    pub node_budget: Option<u64>,
    #[serde(default)]
    pub observable: Observable,
    #[serde(default)]
    pub normalizer: Normalizer,
    #[serde(default = "default_true")]
    pub plot: bool,
    #[serde(default)]
    pub checks: Vec<Check>,
}

/// Format of a config document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
}

impl Format {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Toml,
        }
    }
}

/// Parse a document into a JSON value tree.
pub fn parse_value(text: &str, format: Format) -> Result<serde_json::Value> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(|e| Error::Config(format!("JSON: {e}"))),
        Format::Toml => {
            let v: toml::Value = toml::from_str(text).map_err(|e| Error::Config(format!("TOML: {e}")))?;
            serde_json::to_value(v).map_err(|e| Error::Config(e.to_string()))
        }
    }
}

/// Hex SHA-256 of the canonical JSON form (keys sorted, no whitespace), so
/// reordering keys or switching between JSON and TOML keeps the hash.
pub fn config_hash(value: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl ExperimentFile {
    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let file: Self = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            Error::Config(format!("{path}: {}", e.into_inner()))
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        let value = parse_value(&text, Format::from_path(path))?;
        let hash = config_hash(&value);
        Ok((Self::from_value(value)?, hash))
    }

    /// Semantic checks, reported with the offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        if self.schema != SCHEMA {
            return bad("schema", format!("expected \"{SCHEMA}\", got \"{}\"", self.schema));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return bad("name", format!("\"{}\" must be non-empty and use [A-Za-z0-9-_.]", self.name));
        }
        if self.samples < 100 {
            return bad("samples", format!("{} is below the minimum of 100", self.samples));
        }
        if self.depths.is_empty() {
            return bad("depths", "grid is empty".into());
        }
        if self.depths[0] == 0 || self.depths.windows(2).any(|w| w[1] <= w[0]) {
            return bad("depths", "grid must be positive and strictly increasing".into());
        }
        for (i, check) in self.checks.iter().enumerate() {
            let key = format!("checks[{i}]");
            match check {
                Check::Slope { tol, .. } if !(*tol > 0.0) => return bad(&key, "tol must be positive".into()),
                Check::Slope { .. } if self.depths.len() < 4 => {
                    return bad(&key, "a slope needs at least 4 depths".into())
                }
                Check::Constant { .. } if !matches!(self.kernel, KernelSpec::Rcm { .. }) => {
                    return bad(&key, "constants are predicted for random cluster kernels only".into())
                }
                Check::Constant { rel_tol, .. } if !(*rel_tol > 0.0) => {
                    return bad(&key, "rel_tol must be positive".into())
                }
                Check::UpperBound if !matches!(self.kernel, KernelSpec::Conductance { .. }) => {
                    return bad(&key, "the upper bound applies to conductance kernels".into())
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The Monte Carlo configuration described by this file.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let dist = self.offspring.build()?;
        let kernel = match self.kernel {
            KernelSpec::Conductance { s } => RecursionFunction::conductance(s)?,
            KernelSpec::Rcm { q, beta } => {
                let beta = match (beta, self.schedule) {
                    (Some(b), _) => b,
                    (None, RSchedule::RcmBeta(_)) => 1.0,
                    (None, _) => {
                        return Err(Error::Config(
                            "kernel.beta: required unless the schedule is rcm_beta".into(),
                        ))
                    }
                };
                RecursionFunction::rcm(beta, q)?
            }
        };
        let mut config = ExperimentConfig::new(
            dist,
            kernel,
            self.schedule,
            self.depths.clone(),
            self.samples,
            self.seed,
        );
        config.engine = self.engine;
        config.pool_size = self.pool_size.unwrap_or(DEFAULT_POOL_SIZE);
        config.node_budget = self.node_budget.unwrap_or(DEFAULT_NODE_BUDGET);
        config.observable = self.observable;
        config.normalizer = self.normalizer;
        Ok(config)
    }

    /// Predicted constant for a [`Check::Constant`].
    pub fn predicted_constant(&self, kind: ConstantKind) -> Result<f64> {
        let KernelSpec::Rcm { q, .. } = self.kernel else {
            return Err(Error::Config("kernel: not a random cluster kernel".into()));
        };
        let dist = self.offspring.build()?;
        match kind {
            ConstantKind::Critical => critical_constant(q, &dist),
            ConstantKind::NearCritical => near_critical_constant(q, &dist),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOML: &str = r#"
schema = "gwc.experiment.v1"
name = "demo"
seed = 3
samples = 200
depths = [4, 6, 8, 10]
[offspring]
kind = "geometric"
p = 0.5
[kernel]
kind = "conductance"
s = 1.0
[schedule]
schedule = "critical_product"
[normalizer]
kind = "an"
[[checks]]
check = "tightness"
"#;

    #[test]
    fn toml_and_json_hash_alike() {
        let v = parse_value(TOML, Format::Toml).unwrap();
        let json = serde_json::to_string_pretty(&v).unwrap();
        let w = parse_value(&json, Format::Json).unwrap();
        assert_eq!(config_hash(&v), config_hash(&w));
        let file = ExperimentFile::from_value(v).unwrap();
        assert_eq!(file.checks.len(), 1);
        assert!(file.plot);
        file.experiment().unwrap().validate().unwrap();
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = r#"{"b": 1, "a": {"y": [1, 2], "x": "s"}}"#;
        let b = r#"{"a": {"x": "s", "y": [1, 2]}, "b": 1}"#;
        let ha = config_hash(&parse_value(a, Format::Json).unwrap());
        let hb = config_hash(&parse_value(b, Format::Json).unwrap());
        assert_eq!(ha, hb);
        let c = r#"{"a": {"x": "s", "y": [2, 1]}, "b": 1}"#;
        assert_ne!(ha, config_hash(&parse_value(c, Format::Json).unwrap()));
    }

    #[test]
    fn errors_name_the_key() {
        let v = parse_value(&TOML.replace("[4, 6, 8, 10]", "[]"), Format::Toml).unwrap();
        let e = ExperimentFile::from_value(v).unwrap_err().to_string();
        assert!(e.contains("depths"), "{e}");
        let v = parse_value(&TOML.replace("p = 0.5", "p = \"x\""), Format::Toml).unwrap();
        let e = ExperimentFile::from_value(v).unwrap_err().to_string();
        assert!(e.contains("offspring"), "{e}");
        let v = parse_value(&TOML.replace("gwc.experiment.v1", "v0"), Format::Toml).unwrap();
        let e = ExperimentFile::from_value(v).unwrap_err().to_string();
        assert!(e.contains("schema"), "{e}");
    }
}
