//! The four subcommands. Each returns its output in memory; [`execute`]
//! writes files only after a command succeeds.

use std::path::Path;

use listdec::io::{read_dataset, read_truth, write_labeled};
use listdec::sparse::l2_distance;
use listdec::{
    disagreement, generate, generate_halfspace, learn_halfspaces, required_sample_size, run_list_decode,
    EstimationParams, HalfspaceAdversary, RunOptions, RunTrace,
};
use rayon::prelude::*;

use crate::config::{Command, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{
    branch_fields, fmt_f64, fmt_opt, fmt_sparse, log_path, write_text, RunLog, RunRecord, Table,
    ESTIMATE_COLUMNS, HALFSPACE_COLUMNS, SWEEP_COLUMNS,
};
use crate::spec::AdversarySpec;

/// Largest dataset (`n·d` values) the harness will materialize.
pub const MAX_VALUES: usize = 1 << 31;

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Option<Table>,
    pub runs: Vec<RunRecord>,
    /// Human-readable summary for stderr.
    pub summary: String,
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::input(format!("missing --{flag}")))
}

fn options(cfg: &ExperimentConfig, seed: u64) -> RunOptions {
    RunOptions {
        seed,
        budget: cfg.budget,
        ..RunOptions::default()
    }
}

/// `--n`, or the required sample size scaled by `--scale`.
pub fn sample_count(cfg: &ExperimentConfig, params: &EstimationParams) -> CliResult<usize> {
    let n = match (cfg.params.n, cfg.params.scale) {
        (Some(n), _) => n,
        (None, Some(scale)) => usize::try_from(required_sample_size(params, scale)?)
            .map_err(|_| CliError::input("required sample size does not fit in memory"))?,
        (None, None) => return Err(CliError::input("give --n or --scale")),
    };
    if n == 0 {
        return Err(CliError::input("need at least one sample"));
    }
    if n.checked_mul(params.d()).is_none_or(|v| v > MAX_VALUES) {
        return Err(CliError::input(format!("n = {n} by d = {} is too large", params.d())));
    }
    Ok(n)
}

fn estimation_params(cfg: &ExperimentConfig, alpha: f64, k: usize, d: usize) -> CliResult<EstimationParams> {
    Ok(EstimationParams::new(alpha, cfg.params.tau, k, d, cfg.params.big_c)?)
}

/// Candidates of a run, or of the part completed before the budget ran out.
fn run_or_partial(
    data: &listdec::Dataset,
    params: &EstimationParams,
    opts: &RunOptions,
) -> CliResult<(Vec<Vec<f64>>, usize, RunTrace, &'static str)> {
    match run_list_decode(data, params, opts) {
        Ok((list, trace)) => Ok((list.reduced, list.raw.len(), trace, "ok")),
        Err(listdec::Error::BudgetExhausted { partial, .. }) => {
            let raw = partial.candidates.len();
            Ok((partial.candidates, raw, partial.trace, "budget"))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_gen(cfg: &ExperimentConfig) -> CliResult<Report> {
    let out = cfg.output.as_deref().ok_or_else(|| CliError::input("missing --out"))?;
    let d = require(cfg.params.d, "d")?;
    let k = require(cfg.params.k, "k")?;
    let model = cfg.model.ok_or_else(|| CliError::input("missing --model"))?;
    let seed = cfg.seeds[0];
    let alpha = cfg.alpha();
    let params = estimation_params(cfg, alpha, k, d)?;
    let n = sample_count(cfg, &params)?;
    let labeled = generate(d, k, n, alpha, cfg.params.magnitude, &model.to_model(d, k, seed)?, seed)?;
    write_labeled(out, &labeled, k).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Report {
        table: None,
        runs: Vec::new(),
        summary: format!(
            "wrote {} samples ({} inliers) in R^{d} to {}",
            n,
            labeled.inlier_count(),
            out.display()
        ),
    })
}

pub fn cmd_estimate(cfg: &ExperimentConfig) -> CliResult<Report> {
    let path = cfg.dataset.as_deref().ok_or_else(|| CliError::input("missing --data"))?;
    if !path.is_file() {
        return Err(CliError::input(format!("{}: no such dataset file", path.display())));
    }
    let data = read_dataset(path)?;
    let truth = read_truth(path)?;
    let k = cfg
        .params
        .k
        .or(truth.as_ref().map(|t| t.k))
        .ok_or_else(|| CliError::input("missing --k and no ground truth to read it from"))?;
    if let Some(d) = cfg.params.d.filter(|&d| d != data.d()) {
        return Err(CliError::input(format!("--d {d} does not match the dataset's d = {}", data.d())));
    }
    if let Some(t) = truth.as_ref().filter(|t| t.true_mean.len() != data.d() || t.inlier_mask.len() != data.n()) {
        return Err(CliError::input(format!(
            "ground truth shape ({} x {}) does not match the dataset",
            t.inlier_mask.len(),
            t.true_mean.len()
        )));
    }
    let alpha = cfg.alpha();
    let params = estimation_params(cfg, alpha, k, data.d())?;

    let results = cfg
        .seeds
        .par_iter()
        .map(|&seed| run_list_decode(&data, &params, &options(cfg, seed)).map(|r| (seed, r)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(ESTIMATE_COLUMNS);
    let mut runs = Vec::new();
    let mut best: Option<f64> = None;
    for (seed, (list, trace)) in &results {
        let prefix = |idx: String, err: Option<f64>, support: String| {
            let c = &trace.branch_counts;
            let mut row = vec![
                seed.to_string(),
                idx,
                fmt_opt(err),
                list.reduced.len().to_string(),
                list.raw.len().to_string(),
                trace.nodes_processed.to_string(),
                trace.max_depth.to_string(),
                trace.clusters.to_string(),
            ];
            row.extend(branch_fields(c));
            row.extend([trace.dropped_small.to_string(), trace.dropped_alpha.to_string(), support]);
            row
        };
        if list.reduced.is_empty() {
            table.push(prefix(String::new(), None, String::new()));
        }
        for (i, c) in list.reduced.iter().enumerate() {
            let err = truth.as_ref().map(|t| l2_distance(c, &t.true_mean));
            if let Some(e) = err {
                best = Some(best.map_or(e, |b| b.min(e)));
            }
            table.push(prefix(i.to_string(), err, fmt_sparse(c)));
        }
        runs.push(RunRecord::new(*seed, alpha, "ok", trace));
    }
    let sizes: Vec<usize> = results.iter().map(|(_, (l, _))| l.reduced.len()).collect();
    let summary = match best {
        Some(b) => format!("list sizes {sizes:?}; best l2 error {b:.4}"),
        None => format!("list sizes {sizes:?}"),
    };
    Ok(Report {
        table: Some(table),
        runs,
        summary,
    })
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> CliResult<Report> {
    let d = require(cfg.params.d, "d")?;
    let k = require(cfg.params.k, "k")?;
    let model = cfg.model.ok_or_else(|| CliError::input("missing --model"))?;
    let grid: Vec<(f64, u64)> = cfg
        .params
        .alpha
        .iter()
        .flat_map(|&a| cfg.seeds.iter().map(move |&s| (a, s)))
        .collect();
    // Validate every setting before spending time on any run.
    for &a in &cfg.params.alpha {
        sample_count(cfg, &estimation_params(cfg, a, k, d)?)?;
    }

    let rows = grid
        .par_iter()
        .map(|&(alpha, seed)| -> CliResult<(Vec<String>, RunRecord)> {
            let params = estimation_params(cfg, alpha, k, d)?;
            let n = sample_count(cfg, &params)?;
            let labeled = generate(d, k, n, alpha, cfg.params.magnitude, &model.to_model(d, k, seed)?, seed)?;
            let (cands, raw, trace, status) = run_or_partial(&labeled.dataset, &params, &options(cfg, seed))?;
            let best = cands
                .iter()
                .map(|c| l2_distance(c, &labeled.true_mean))
                .min_by(f64::total_cmp);
            let mut row = vec![
                fmt_f64(alpha),
                seed.to_string(),
                model.to_string(),
                status.to_string(),
                cands.len().to_string(),
                raw.to_string(),
                fmt_opt(best),
                trace.nodes_processed.to_string(),
                trace.max_depth.to_string(),
            ];
            row.extend(branch_fields(&trace.branch_counts));
            Ok((row, RunRecord::new(seed, alpha, status, &trace)))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new(SWEEP_COLUMNS);
    let mut runs = Vec::new();
    for (row, rec) in rows {
        table.push(row);
        runs.push(rec);
    }
    let exhausted = runs.iter().filter(|r| r.status != "ok").count();
    Ok(Report {
        summary: format!("{} runs, {exhausted} hit the node budget", runs.len()),
        table: Some(table),
        runs,
    })
}

/// Default adversary of the `halfspace` command.
pub const DEFAULT_ADVERSARY: HalfspaceAdversary = HalfspaceAdversary::ShiftedDecoy { magnitude: 15.0 };

pub fn cmd_halfspace(cfg: &ExperimentConfig) -> CliResult<Report> {
    let d = require(cfg.params.d, "d")?;
    let k = require(cfg.params.k, "k")?;
    let adv = cfg.adversary.unwrap_or(AdversarySpec(DEFAULT_ADVERSARY));
    let alpha = cfg.alpha();
    let params = estimation_params(cfg, alpha, k, d)?;
    let n = sample_count(cfg, &params)?;

    let rows = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> CliResult<(Vec<String>, RunRecord, Option<f64>)> {
            let data = generate_halfspace(d, k, n, alpha, adv.0, seed)?;
            let (hyps, trace, status) = match learn_halfspaces(&data.samples, &params, &options(cfg, seed)) {
                Ok((h, t)) => (h.into_iter().map(|h| h.w).collect::<Vec<_>>(), t, "ok"),
                Err(listdec::Error::BudgetExhausted { partial, .. }) => (partial.candidates, partial.trace, "budget"),
                Err(e) => return Err(e.into()),
            };
            let best = hyps
                .iter()
                .enumerate()
                .filter_map(|(i, w)| disagreement(w, &data.w_star).ok().map(|v| (i, v)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            let mut row = vec![
                seed.to_string(),
                adv.to_string(),
                status.to_string(),
                hyps.len().to_string(),
                fmt_opt(best.map(|b| b.1)),
                best.map(|b| b.0.to_string()).unwrap_or_default(),
                trace.nodes_processed.to_string(),
            ];
            row.extend(branch_fields(&trace.branch_counts));
            Ok((row, RunRecord::new(seed, alpha, status, &trace), best.map(|b| b.1)))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new(HALFSPACE_COLUMNS);
    let mut runs = Vec::new();
    let mut good = 0;
    for (row, rec, best) in rows {
        table.push(row);
        runs.push(rec);
        good += usize::from(best.is_some_and(|b| b <= 0.15));
    }
    Ok(Report {
        summary: format!("{good}/{} seeds have a hypothesis within disagreement 0.15", runs.len()),
        table: Some(table),
        runs,
    })
}

pub fn dispatch(cfg: &ExperimentConfig) -> CliResult<Report> {
    cfg.validate()?;
    match cfg.command {
        Command::Gen => cmd_gen(cfg),
        Command::Estimate => cmd_estimate(cfg),
        Command::Halfspace => cmd_halfspace(cfg),
        Command::Sweep => cmd_sweep(cfg),
    }
}

/// Runs a command and writes its CSV (to `output`, or stdout) and run log.
pub fn execute(cfg: &ExperimentConfig) -> CliResult<Report> {
    let report = dispatch(cfg)?;
    if let Some(table) = &report.table {
        let csv = table.to_csv();
        match &cfg.output {
            Some(p) => write_text(p, &csv)?,
            None => print!("{csv}"),
        }
    }
    if cfg.command != Command::Gen {
        if let Some(p) = log_path(cfg) {
            write_text(&p, &RunLog::new(cfg, report.runs.clone())?.to_json()?)?;
        }
    }
    Ok(report)
}

/// Reads a saved config.
pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text)
}
