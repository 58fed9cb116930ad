use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::FitMode;
use crate::families::FamilyDescriptor;
use crate::orbit::{log_spaced, DEFAULT_REFINEMENT_ROUNDS};

/// Explicit checkpoint list or `logspaced:K` over `[1, n_max]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoints {
    List(Vec<u64>),
    LogSpaced(usize),
}

impl Checkpoints {
    pub fn resolve(&self, n_max: u64) -> Vec<u64> {
        match self {
            Checkpoints::List(v) => v.clone(),
            Checkpoints::LogSpaced(k) => log_spaced(1, n_max, *k),
        }
    }
}

impl Default for Checkpoints {
    fn default() -> Self {
        Checkpoints::LogSpaced(20)
    }
}

impl FromStr for Checkpoints {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("logspaced:").or_else(|| t.strip_prefix("log-spaced:")) {
            let k: usize = rest.trim().parse().map_err(|_| format!("bad checkpoint count in {s:?}"))?;
            if k == 0 {
                return Err("checkpoint count must be positive".into());
            }
            return Ok(Checkpoints::LogSpaced(k));
        }
        let list = t
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|_| format!("bad checkpoint {p:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Checkpoints::List(list))
    }
}

impl fmt::Display for Checkpoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Checkpoints::LogSpaced(k) => write!(f, "logspaced:{k}"),
            Checkpoints::List(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Serialize for Checkpoints {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Checkpoints::List(v) => v.serialize(s),
            Checkpoints::LogSpaced(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Checkpoints {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<u64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(Checkpoints::List(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    pub mode: FitMode,
    pub window: (u64, u64),
}

/// Parameters for `verify`; every field has a per-lemma default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    pub x: Option<f64>,
    pub x1: Option<f64>,
    pub n: Option<u64>,
    pub ns: Option<Vec<u64>>,
    pub xs: Option<Vec<f64>>,
    pub interval: Option<(f64, f64)>,
    pub delta: Option<f64>,
    #[serde(rename = "N")]
    pub big_n: Option<u64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub b: Option<f64>,
    pub k: Option<u64>,
    pub grid: Option<usize>,
    pub pair_samples: Option<usize>,
}

fn default_n_max() -> u64 {
    10_000
}

fn default_grid() -> usize {
    4096
}

fn default_rounds() -> u32 {
    DEFAULT_REFINEMENT_ROUNDS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Option<FamilyDescriptor>,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default)]
    pub checkpoints: Checkpoints,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    #[serde(default = "default_rounds")]
    pub refinement_rounds: u32,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub fit_windows: Vec<FitWindow>,
    #[serde(default)]
    pub verify: VerifyParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: None,
            n_max: default_n_max(),
            checkpoints: Checkpoints::default(),
            grid_size: default_grid(),
            refinement_rounds: default_rounds(),
            output: None,
            fit_windows: Vec::new(),
            verify: VerifyParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {}: {e}", path.display()))
    }
}
