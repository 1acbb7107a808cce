//! The multifilter tree over the clusters of a dataset, followed by list
//! reduction.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::{cluster_with, ClusterOptions};
use crate::dataset::Dataset;
use crate::error::{param, Error, Result};
use crate::multifilter::{attribute_efficient_multifilter, Branch};
use crate::params::EstimationParams;
use crate::sparse::{dot, l2_distance, lex_cmp};
use crate::types::{potential, FilterOutcome, WorkItem};

/// Tallies of what the multifilter calls did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BranchCounts {
    pub candidate: usize,
    pub linear: usize,
    pub quadratic: usize,
    pub reject: usize,
    pub split1: usize,
    pub split2: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub nodes_processed: usize,
    pub branch_counts: BranchCounts,
    pub max_depth: usize,
    /// Items dropped for having fewer than two samples.
    pub dropped_small: usize,
    /// Children dropped for having purity above 1.
    pub dropped_alpha: usize,
    /// Number of clusters the tree started from.
    pub clusters: usize,
    pub wall_time: Duration,
}

/// What was collected before the node budget ran out.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialRun {
    pub candidates: Vec<Vec<f64>>,
    pub trace: RunTrace,
}

/// Slab half-width and support threshold of list reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionParams {
    pub beta: f64,
    pub delta: f64,
    pub t: f64,
}

/// Constant in front of the candidate-accuracy scale used for `beta`.
pub const C_TEST: f64 = 1.0;

impl ReductionParams {
    /// `β = c·√(ln(1/α)/α)·ln(2 + ln(1/α))`, `t = √(2 ln(2n/α))`,
    /// `δ = α³/100`.
    pub fn defaults(alpha: f64, n: usize) -> Self {
        let la = (1.0 / alpha).ln();
        Self {
            beta: C_TEST * (la / alpha).sqrt() * (2.0 + la).ln(),
            delta: alpha.powi(3) / 100.0,
            t: (2.0 * (2.0 * n as f64 / alpha).ln()).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Maximum number of processed nodes; `None` uses
    /// [`default_budget`].
    pub budget: Option<usize>,
    pub reduction: Option<ReductionParams>,
    pub cluster: ClusterOptions,
}

/// `⌈10·(4/α² + 1/α + 1)⌉`.
pub fn default_budget(alpha: f64) -> usize {
    (10.0 * (4.0 / (alpha * alpha) + 1.0 / alpha + 1.0)).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateList {
    /// Every candidate the tree produced, sorted lexicographically.
    pub raw: Vec<Vec<f64>>,
    /// The reduced list.
    pub reduced: Vec<Vec<f64>>,
}

/// Seed for the `counter`-th item created in a run.
pub fn sub_seed(master: u64, counter: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(counter);
    rng.next_u64()
}

pub fn run_list_decode(
    data: &Dataset,
    params: &EstimationParams,
    options: &RunOptions,
) -> Result<(CandidateList, RunTrace)> {
    let start = Instant::now();
    let n = data.n();
    if n < 2 {
        return param(format!("need at least 2 samples, got {n}"));
    }
    let budget = options.budget.unwrap_or_else(|| default_budget(params.alpha()));
    let call_tau = params.tau() / n as f64;

    let clusters = cluster_with(data, params, options.cluster);
    let mut trace = RunTrace {
        clusters: clusters.subsets.len(),
        ..RunTrace::default()
    };
    let mut created = 0u64;
    let mut queue: VecDeque<(WorkItem, usize)> = VecDeque::new();
    for item in clusters.subsets {
        queue.push_back((item.with_seed(sub_seed(options.seed, created)), 0));
        created += 1;
    }
    let mut level = potential(queue.iter().map(|(w, _)| w));
    let mut found: Vec<Vec<f64>> = Vec::new();

    while let Some((item, depth)) = queue.pop_front() {
        let before = level;
        level -= item.alpha.powi(-2);
        if item.len() < 2 {
            trace.dropped_small += 1;
            continue;
        }
        if trace.nodes_processed >= budget {
            found.sort_by(|a, b| lex_cmp(a, b));
            trace.wall_time = start.elapsed();
            return Err(Error::BudgetExhausted {
                budget,
                partial: Box::new(PartialRun {
                    candidates: found,
                    trace,
                }),
            });
        }
        trace.nodes_processed += 1;
        trace.max_depth = trace.max_depth.max(depth);

        let fp = params.for_item(item.alpha, call_tau);
        let report = attribute_efficient_multifilter(&item, data, &fp)?;
        let counts = &mut trace.branch_counts;
        match report.branch {
            Branch::Candidate => counts.candidate += 1,
            Branch::Linear => counts.linear += 1,
            Branch::Quadratic => counts.quadratic += 1,
        }
        match report.outcome {
            FilterOutcome::Candidate(mu) => found.push(mu),
            FilterOutcome::Reject => counts.reject += 1,
            FilterOutcome::Split(children) => {
                if children.len() == 1 {
                    counts.split1 += 1;
                } else {
                    counts.split2 += 1;
                }
                for child in children {
                    if child.alpha > 1.0 {
                        trace.dropped_alpha += 1;
                        continue;
                    }
                    level += child.alpha.powi(-2);
                    queue.push_back((child.with_seed(sub_seed(options.seed, created)), depth + 1));
                    created += 1;
                }
            }
        }
        if level > before * (1.0 + 1e-9) + 1e-9 {
            return Err(Error::Invariant(format!(
                "work-list potential rose from {before} to {level}"
            )));
        }
    }

    found.sort_by(|a, b| lex_cmp(a, b));
    let rp = options
        .reduction
        .unwrap_or_else(|| ReductionParams::defaults(params.alpha(), n));
    let reduced = list_reduction(&found, data, params.alpha(), &rp)?;
    trace.wall_time = start.elapsed();
    Ok((
        CandidateList {
            raw: found,
            reduced,
        },
        trace,
    ))
}

/// Keeps, in input order, each candidate whose slab intersection holds at
/// least `α(1 − δN)n` samples and that is farther than `2(β + t)` from every
/// candidate kept before it.
pub fn list_reduction(
    candidates: &[Vec<f64>],
    data: &Dataset,
    alpha: f64,
    rp: &ReductionParams,
) -> Result<Vec<Vec<f64>>> {
    let big_n = candidates.len();
    if big_n == 0 {
        return Ok(Vec::new());
    }
    if rp.delta * big_n as f64 > 0.1 {
        return param(format!(
            "list reduction needs delta·|M| <= 0.1, got {}",
            rp.delta * big_n as f64
        ));
    }
    let width = rp.beta + rp.t;
    let need = alpha * (1.0 - rp.delta * big_n as f64) * data.n() as f64;

    // xm[r][i] = x_r · μ_i.
    let xm: Vec<Vec<f64>> = data
        .rows()
        .map(|x| candidates.iter().map(|mu| dot(x, mu)).collect())
        .collect();
    let gram: Vec<Vec<f64>> = candidates
        .iter()
        .map(|a| candidates.iter().map(|b| dot(a, b)).collect())
        .collect();
    let dist: Vec<Vec<f64>> = candidates
        .iter()
        .map(|a| candidates.iter().map(|b| l2_distance(a, b)).collect())
        .collect();

    let support = |i: usize| -> usize {
        xm.iter()
            .filter(|row| {
                (0..big_n).all(|j| {
                    if j == i || dist[i][j] == 0.0 {
                        return true;
                    }
                    // (μ_i − μ_j)·(x − μ_i) / ‖μ_i − μ_j‖
                    let proj = (row[i] - row[j] - gram[i][i] + gram[i][j]) / dist[i][j];
                    proj.abs() < width
                })
            })
            .count()
    };

    let mut kept: Vec<usize> = Vec::new();
    for i in 0..big_n {
        if kept.iter().any(|&j| dist[i][j] <= 2.0 * width) {
            continue;
        }
        if support(i) as f64 >= need {
            kept.push(i);
        }
    }
    Ok(kept.into_iter().map(|i| candidates[i].clone()).collect())
}
