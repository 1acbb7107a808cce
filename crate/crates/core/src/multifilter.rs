//! One step of the attribute-efficient multifilter.
//!
//! From the empirical mean and covariance of a work item, keep the `k`
//! largest diagonal and `k² − k` largest off-diagonal cells of `Σ̃ − I`. If
//! their Frobenius norm is small the hard-thresholded mean is a candidate.
//! Otherwise filter along the top eigenvector of the restricted block when its
//! eigenvalue is large, or along the harmonic quadratic built from the
//! selected cells.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{param, Error, Result};
use crate::filter_basic::{basic_multifilter, BasicOutcome};
use crate::filter_quadratic::{fix_sign, quadratic_multifilter, QuadContext};
use crate::params::FilterParams;
use crate::polynomials::{HarmonicQuadratic, PolyProbe, SparseLinear};
use crate::sparse::hard_threshold;
use crate::types::{FilterOutcome, WorkItem};

/// Iteration cap of [`leading_eig`].
pub const POWER_MAX_ITER: usize = 10_000;
/// Relative Rayleigh-quotient tolerance used by the multifilter.
pub const POWER_TOL: f64 = 1e-13;

/// A selected cell `(i, j, value)` of `Σ̃ − I` with `i <= j`.
pub type Cell = (usize, usize, f64);

/// Moments of a work item restricted to the selected cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    /// Sample mean `μ̃`.
    pub mean: Vec<f64>,
    /// Selected diagonal cells, largest magnitude first.
    pub diagonal: Vec<Cell>,
    /// Selected off-diagonal pairs `i < j`, largest magnitude first.
    pub off_diagonal: Vec<Cell>,
    /// Frobenius norm of `(Σ̃ − I)` on the selected cells, off-diagonal pairs
    /// counted twice.
    pub frob_selected: f64,
    /// Sorted coordinates touched by the selection.
    pub omega: Vec<usize>,
    /// Dense `|Ω| × |Ω|` row-major block of `Σ̃ − I` on `Ω × Ω`.
    pub block: Vec<f64>,
}

impl MomentSummary {
    /// All selected cells, diagonal first.
    pub fn cells(&self) -> Vec<Cell> {
        self.diagonal
            .iter()
            .chain(&self.off_diagonal)
            .copied()
            .collect()
    }
}

/// Heap entry ordered so that the worst kept cell sits on top: smaller
/// magnitude is worse, and on ties the lexicographically larger pair is.
#[derive(Debug, Clone, Copy)]
struct Ranked(Cell);

impl Ranked {
    fn key(&self) -> (f64, usize, usize) {
        (self.0 .2.abs(), self.0 .0, self.0 .1)
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, ai, aj) = self.key();
        let (b, bi, bj) = other.key();
        b.total_cmp(&a).then((ai, aj).cmp(&(bi, bj)))
    }
}

/// Keeps the `cap` best cells seen.
#[derive(Debug, Clone)]
struct TopCells {
    cap: usize,
    heap: BinaryHeap<Ranked>,
}

impl TopCells {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            heap: BinaryHeap::with_capacity(cap + 1),
        }
    }

    fn push(&mut self, cell: Cell) {
        if self.cap == 0 {
            return;
        }
        self.heap.push(Ranked(cell));
        if self.heap.len() > self.cap {
            self.heap.pop();
        }
    }

    fn merge(mut self, other: TopCells) -> Self {
        for r in other.heap {
            self.push(r.0);
        }
        self
    }

    /// Best first.
    fn into_sorted(self) -> Vec<Cell> {
        let mut v: Vec<Ranked> = self.heap.into_vec();
        v.sort();
        v.into_iter().map(|r| r.0).collect()
    }
}

/// Coordinates per tile of the off-diagonal scan.
const TILE: usize = 16;

/// Mean, selected cells of `Σ̃ − I` (normalized by `1/n`), and the dense block
/// on their support. Peak memory is the centered copy of the item plus the
/// selection buffers.
pub fn moment_summary(item: &WorkItem, data: &Dataset, k: usize) -> Result<MomentSummary> {
    let n = item.len();
    if n < 2 {
        return param(format!("moments need at least 2 samples, got {n}"));
    }
    let d = data.d();
    let nf = n as f64;
    let mut mean = vec![0.0; d];
    for &i in &item.subset {
        for (m, x) in mean.iter_mut().zip(data.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= nf);

    // Column-major centered data: column j is contiguous.
    let mut cols = vec![0.0; n * d];
    for (r, &i) in item.subset.iter().enumerate() {
        for (j, x) in data.row(i).iter().enumerate() {
            cols[j * n + r] = x - mean[j];
        }
    }
    let col = |j: usize| &cols[j * n..(j + 1) * n];
    let cov = |i: usize, j: usize| -> f64 {
        let s: f64 = col(i).iter().zip(col(j)).map(|(a, b)| a * b).sum();
        s / nf - if i == j { 1.0 } else { 0.0 }
    };

    let k_diag = k.min(d);
    let k_off = ((k * k - k) / 2).min(d * (d - 1) / 2);

    let mut diag = TopCells::new(k_diag);
    for j in 0..d {
        diag.push((j, j, cov(j, j)));
    }
    let tiles = d.div_ceil(TILE);
    let off = (0..tiles)
        .into_par_iter()
        .map(|ti| {
            let mut top = TopCells::new(k_off);
            if k_off == 0 {
                return top;
            }
            for i in ti * TILE..((ti + 1) * TILE).min(d) {
                for j in i + 1..d {
                    top.push((i, j, cov(i, j)));
                }
            }
            top
        })
        .reduce(|| TopCells::new(k_off), TopCells::merge);

    let diagonal = diag.into_sorted();
    let off_diagonal = off.into_sorted();
    let frob2: f64 = diagonal.iter().map(|c| c.2 * c.2).sum::<f64>()
        + 2.0 * off_diagonal.iter().map(|c| c.2 * c.2).sum::<f64>();

    let mut omega: Vec<usize> = diagonal
        .iter()
        .chain(&off_diagonal)
        .flat_map(|&(i, j, _)| [i, j])
        .collect();
    omega.sort_unstable();
    omega.dedup();
    let m = omega.len();
    let mut block = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let v = cov(omega[a], omega[b]);
            block[a * m + b] = v;
            block[b * m + a] = v;
        }
    }

    Ok(MomentSummary {
        mean,
        diagonal,
        off_diagonal,
        frob_selected: frob2.sqrt(),
        omega,
        block,
    })
}

/// Largest eigenvalue (by value) and its unit eigenvector of the symmetric
/// `m × m` row-major matrix, by power iteration on `B + σI` where `σ` bounds
/// the spectral radius. The eigenvector's largest-magnitude entry is positive.
pub fn leading_eig(block: &[f64], m: usize, tol: f64) -> Result<(f64, Vec<f64>)> {
    if m == 0 || block.len() != m * m {
        return param("leading_eig needs a nonempty square matrix");
    }
    let sigma = (0..m)
        .map(|r| block[r * m..(r + 1) * m].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if sigma == 0.0 {
        let mut e = vec![0.0; m];
        e[0] = 1.0;
        return Ok((0.0, e));
    }
    // The extra margin keeps the shifted matrix positive definite.
    let shift = 1.01 * sigma;
    let mul = |v: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|r| block[r * m..(r + 1) * m].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    };
    let normalize = |v: &mut Vec<f64>| {
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= s);
    };
    let mut v: Vec<f64> = (0..m).map(|i| 1.0 + 0.01 * i as f64).collect();
    normalize(&mut v);
    let mut bv = mul(&v);
    let mut rho: f64 = v.iter().zip(&bv).map(|(a, b)| a * b).sum();
    for _ in 0..POWER_MAX_ITER {
        let mut w: Vec<f64> = bv.iter().zip(&v).map(|(b, x)| b + shift * x).collect();
        normalize(&mut w);
        v = w;
        bv = mul(&v);
        let next: f64 = v.iter().zip(&bv).map(|(a, b)| a * b).sum();
        let done = (next - rho).abs() <= tol * next.abs();
        rho = next;
        if done {
            fix_sign(&mut v);
            return Ok((rho, v));
        }
    }
    Err(Error::NoConvergence {
        solver: "power iteration",
        iterations: POWER_MAX_ITER,
    })
}

/// Which of the three branches a multifilter call took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Candidate,
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    pub outcome: FilterOutcome,
    pub branch: Branch,
    /// Leading eigenvalue of the restricted block, when it was computed.
    pub lambda_star: Option<f64>,
    pub frob_selected: f64,
    /// The basic-filter verdict behind a `Reject` or `Split`.
    pub basic: Option<BasicOutcome>,
}

/// One multifilter step on `item`. `fp` carries the item's purity and
/// confidence.
pub fn attribute_efficient_multifilter(
    item: &WorkItem,
    data: &Dataset,
    fp: &FilterParams,
) -> Result<FilterReport> {
    let summary = moment_summary(item, data, fp.k)?;
    let threshold = fp.spectral_threshold();
    let frob = summary.frob_selected;
    if frob <= threshold {
        return Ok(FilterReport {
            outcome: FilterOutcome::Candidate(hard_threshold(&summary.mean, fp.k)?),
            branch: Branch::Candidate,
            lambda_star: None,
            frob_selected: frob,
            basic: None,
        });
    }

    let m = summary.omega.len();
    let (lambda, v) = leading_eig(&summary.block, m, POWER_TOL)?;
    let shift: Vec<f64> = summary.omega.iter().map(|&i| summary.mean[i]).collect();
    let (branch, basic) = if lambda >= threshold {
        let probe = PolyProbe::Linear(SparseLinear::new(summary.omega.clone(), v, shift)?);
        (Branch::Linear, basic_multifilter(&probe, item, data, fp))
    } else {
        let probe = HarmonicQuadratic::from_cells(&summary.cells(), &summary.mean)?;
        let ctx = QuadContext::new(probe, fp);
        (Branch::Quadratic, quadratic_multifilter(&ctx, item, data, fp)?)
    };
    // A linear Yes cannot happen once λ* clears the threshold (the variance
    // along v* is λ* + 1, above the cap); treat it like No.
    let outcome = match &basic {
        BasicOutcome::Yes { .. } | BasicOutcome::No(_) => FilterOutcome::Reject,
        split => FilterOutcome::Split(split.children()),
    };
    Ok(FilterReport {
        outcome,
        branch,
        lambda_star: Some(lambda),
        frob_selected: frob,
        basic: Some(basic),
    })
}
