//! CSV tables and JSON run logs.
//!
//! Every CSV float is written with 17 significant digits (`{:.16e}`), so a
//! table reproduces the exact `f64` values. Missing values are empty fields.
//! Timing goes to the run log only, which keeps tables byte-reproducible.

use std::fs;
use std::path::{Path, PathBuf};

use listdec::{BranchCounts, RunTrace};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Nonzero entries as `index:value` pairs joined by `;`.
pub fn fmt_sparse(v: &[f64]) -> String {
    v.iter()
        .enumerate()
        .filter(|(_, x)| **x != 0.0)
        .map(|(i, x)| format!("{i}:{}", fmt_f64(*x)))
        .collect::<Vec<_>>()
        .join(";")
}

/// `estimate`: one row per reduced candidate, or a single row with an empty
/// `candidate` field when the list is empty.
pub const ESTIMATE_COLUMNS: &[&str] = &[
    "seed", "candidate", "l2_error", "list_size", "raw_size", "nodes", "max_depth", "clusters",
    "candidate_calls", "linear", "quadratic", "reject", "split1", "split2", "dropped_small",
    "dropped_alpha", "support",
];

/// `sweep`: one row per `(alpha, seed)` run.
pub const SWEEP_COLUMNS: &[&str] = &[
    "alpha", "seed", "model", "status", "list_size", "raw_size", "best_error", "nodes", "max_depth",
    "candidate_calls", "linear", "quadratic", "reject", "split1", "split2",
];

/// `halfspace`: one row per seed.
pub const HALFSPACE_COLUMNS: &[&str] = &[
    "seed", "adversary", "status", "list_size", "best_disagreement", "best_index", "nodes",
    "candidate_calls", "linear", "quadratic", "reject", "split1", "split2",
];

/// Branch tallies in column order.
pub fn branch_fields(c: &BranchCounts) -> Vec<String> {
    [c.candidate, c.linear, c.quadratic, c.reject, c.split1, c.split2]
        .iter()
        .map(|v| v.to_string())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchTally {
    pub candidate: usize,
    pub linear: usize,
    pub quadratic: usize,
    pub reject: usize,
    pub split1: usize,
    pub split2: usize,
}

impl From<&BranchCounts> for BranchTally {
    fn from(c: &BranchCounts) -> Self {
        Self {
            candidate: c.candidate,
            linear: c.linear,
            quadratic: c.quadratic,
            reject: c.reject,
            split1: c.split1,
            split2: c.split2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub alpha: f64,
    pub status: &'static str,
    pub wall_time_s: f64,
    pub nodes: usize,
    pub max_depth: usize,
    pub clusters: usize,
    pub dropped_small: usize,
    pub dropped_alpha: usize,
    pub branches: BranchTally,
}

impl RunRecord {
    pub fn new(seed: u64, alpha: f64, status: &'static str, trace: &RunTrace) -> Self {
        Self {
            seed,
            alpha,
            status,
            wall_time_s: trace.wall_time.as_secs_f64(),
            nodes: trace.nodes_processed,
            max_depth: trace.max_depth,
            clusters: trace.clusters,
            dropped_small: trace.dropped_small,
            dropped_alpha: trace.dropped_alpha,
            branches: (&trace.branch_counts).into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunLog {
    pub tool: &'static str,
    pub version: &'static str,
    /// Source revision the binary was built from.
    pub revision: &'static str,
    pub config: ExperimentConfig,
    /// The config in its TOML form, ready to be saved and replayed.
    pub config_toml: String,
    pub runs: Vec<RunRecord>,
}

impl RunLog {
    pub fn new(config: &ExperimentConfig, runs: Vec<RunRecord>) -> CliResult<Self> {
        Ok(Self {
            tool: "listdec",
            version: env!("CARGO_PKG_VERSION"),
            revision: env!("LISTDEC_REVISION"),
            config: config.clone(),
            config_toml: config.to_toml()?,
            runs,
        })
    }

    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(format!("run log: {e}")))
    }
}

/// Where the run log goes: the explicit path, else next to the CSV.
pub fn log_path(config: &ExperimentConfig) -> Option<PathBuf> {
    config
        .log
        .clone()
        .or_else(|| config.output.as_ref().map(|o| o.with_extension("log.json")))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::output(&path.display().to_string(), e))
}
