//! The full description of one CLI invocation, serializable to TOML so a run
//! can be recorded and replayed.

use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};
use crate::spec::{AdversarySpec, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Gen,
    Estimate,
    Halfspace,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// One value for every command except `sweep`.
    pub alpha: Vec<f64>,
    pub tau: f64,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub big_c: f64,
    /// Multiplier of the required sample size, used when `n` is absent.
    pub scale: Option<f64>,
    /// Magnitude of the nonzero entries of the generated mean.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub dataset: Option<PathBuf>,
    pub params: Params,
    #[serde(default, with = "text_form")]
    pub model: Option<ModelSpec>,
    #[serde(default, with = "text_form")]
    pub adversary: Option<AdversarySpec>,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    pub log: Option<PathBuf>,
    pub budget: Option<usize>,
}

mod text_form {
    use super::*;
    use std::fmt::Display;
    use std::str::FromStr;

    pub fn serialize<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
    where
        T: FromStr<Err = CliError>,
        D: Deserializer<'de>,
    {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Internal(format!("serializing config: {e}")))
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the fields every command relies on.
    pub fn validate(&self) -> CliResult<()> {
        let p = &self.params;
        if p.alpha.is_empty() {
            return Err(CliError::input("no alpha given"));
        }
        if self.command != Command::Sweep && p.alpha.len() != 1 {
            return Err(CliError::input("only sweep accepts several alpha values"));
        }
        if let Some(&a) = p.alpha.iter().find(|a| !(**a > 0.0 && **a <= 0.5)) {
            return Err(CliError::input(format!("alpha must lie in (0, 1/2], got {a}")));
        }
        if !(p.tau > 0.0 && p.tau < 1.0) {
            return Err(CliError::input(format!("tau must lie in (0, 1), got {}", p.tau)));
        }
        if !(p.big_c > 0.0 && p.big_c.is_finite()) {
            return Err(CliError::input(format!("C must be positive, got {}", p.big_c)));
        }
        if let Some(s) = p.scale.filter(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(CliError::input(format!("scale must be positive, got {s}")));
        }
        if !p.magnitude.is_finite() {
            return Err(CliError::input("magnitude must be finite"));
        }
        if self.seeds.is_empty() {
            return Err(CliError::input("no seeds given"));
        }
        if self.seeds.iter().any(|&s| s > i64::MAX as u64) {
            return Err(CliError::input("seeds must be below 2^63"));
        }
        if self.command == Command::Gen && self.seeds.len() != 1 {
            return Err(CliError::input("gen takes exactly one seed"));
        }
        Ok(())
    }

    /// The single `alpha` of a non-sweep command.
    pub fn alpha(&self) -> f64 {
        self.params.alpha[0]
    }
}
