//! One-dimensional multifilter on the values of a probe polynomial.
//!
//! Given the value `p(x)` of every sample in a work item, the filter either
//! certifies that the values concentrate (`Yes`), declares the item bad
//! (`No`), or returns one or two children whose purities satisfy
//! `Σ 1/α_i² ≤ 1/α²`.

use crate::dataset::Dataset;
use crate::params::FilterParams;
use crate::polynomials::{eval_probe, PolyProbe};
use crate::types::WorkItem;

/// Thresholds of the basic filter for a probe of degree `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicThresholds {
    /// `(C ln(1/α))^{l/2}`.
    pub r: f64,
    /// Dense-interval length `C·R·ln(2 + ln(1/α))`.
    pub l: f64,
    /// `C·(ln(1/α))^l·ln²(2 + ln(1/α))`.
    pub variance_cap: f64,
    /// `(C(1 + k²γ/l))^{l/2}`.
    pub value_cap: f64,
}

impl BasicThresholds {
    pub fn new(fp: &FilterParams, degree: u32) -> Self {
        let c = fp.big_c;
        let la = fp.log_inv_alpha();
        let lf = degree as f64;
        let r = (c * la).powf(lf / 2.0);
        let loglog = (2.0 + la).ln();
        Self {
            r,
            l: c * r * loglog,
            variance_cap: c * la.powf(lf) * loglog * loglog,
            value_cap: (c * (1.0 + fp.sparsity() * fp.gamma / lf)).powf(lf / 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoReason {
    /// The probe values spread wider than the value cap.
    RangeExceeded,
    /// Neither a tail threshold nor a two-way split exists.
    NoSplit,
    /// The quadratic filter's final check passed, which cannot happen on a
    /// good set that reached it.
    QuadraticYes,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BasicOutcome {
    Yes { mean: f64, variance: f64 },
    No(NoReason),
    SplitOne(WorkItem),
    SplitTwo(WorkItem, WorkItem),
}

impl BasicOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, BasicOutcome::Yes { .. })
    }

    /// Children of a split, empty otherwise.
    pub fn children(&self) -> Vec<WorkItem> {
        match self {
            BasicOutcome::SplitOne(a) => vec![a.clone()],
            BasicOutcome::SplitTwo(a, b) => vec![a.clone(), b.clone()],
            _ => Vec::new(),
        }
    }
}

/// Evaluates `probe` on every sample of `item` and runs the filter.
pub fn basic_multifilter(
    probe: &PolyProbe,
    item: &WorkItem,
    data: &Dataset,
    fp: &FilterParams,
) -> BasicOutcome {
    let values: Vec<f64> = item
        .subset
        .iter()
        .map(|&i| eval_probe(probe, data.row(i)))
        .collect();
    filter_values(&values, probe.degree(), item, fp)
}

/// The filter on precomputed values, `values[i]` belonging to
/// `item.subset[i]`.
pub fn filter_values(values: &[f64], degree: u32, item: &WorkItem, fp: &FilterParams) -> BasicOutcome {
    let n = values.len();
    assert_eq!(n, item.len(), "one value per sample");
    if n == 0 {
        return BasicOutcome::No(NoReason::NoSplit);
    }
    let th = BasicThresholds::new(fp, degree);
    let alpha = fp.alpha;

    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi - lo < th.value_cap) {
        return BasicOutcome::No(NoReason::RangeExceeded);
    }

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some((a, b)) = find_dense_interval(&sorted, alpha, th.l) {
        let (mean, variance) = mean_variance(values);
        if variance <= th.variance_cap {
            return BasicOutcome::Yes { mean, variance };
        }
        if let Some(t) = find_tail_threshold(values, a, b, fp, degree, th.r) {
            let keep: Vec<usize> = (0..n)
                .filter(|&i| interval_distance(values[i], a, b) < t)
                .collect();
            let ratio = n as f64 / keep.len() as f64;
            let child_alpha = alpha * ((1.0 - alpha / 8.0) * ratio + alpha / 8.0);
            return BasicOutcome::SplitOne(WorkItem::new(pick(item, &keep), child_alpha));
        }
    }

    match find_split(values, alpha) {
        Some(split) => {
            let shrink = alpha * (1.0 - alpha * alpha / 100.0) * n as f64;
            let a1 = shrink / split.part1.len() as f64;
            let a2 = shrink / split.part2.len() as f64;
            BasicOutcome::SplitTwo(
                WorkItem::new(pick(item, &split.part1), a1),
                WorkItem::new(pick(item, &split.part2), a2),
            )
        }
        None => BasicOutcome::No(NoReason::NoSplit),
    }
}

fn pick(item: &WorkItem, positions: &[usize]) -> Vec<usize> {
    positions.iter().map(|&i| item.subset[i]).collect()
}

/// Population mean and variance.
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Distance from `v` to the closed interval `[a, b]`.
pub fn interval_distance(v: f64, a: f64, b: f64) -> f64 {
    if v < a {
        a - v
    } else if v > b {
        v - b
    } else {
        0.0
    }
}

/// Leftmost window `[v_i, v_i + len]` holding at least `⌈(1 − α/2)n⌉` of the
/// sorted values.
pub fn find_dense_interval(sorted: &[f64], alpha: f64, len: f64) -> Option<(f64, f64)> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let need = ((1.0 - alpha / 2.0) * n as f64).ceil() as usize;
    let mut j = 0;
    for i in 0..n {
        let end = sorted[i] + len;
        j = j.max(i);
        while j < n && sorted[j] <= end {
            j += 1;
        }
        if j - i >= need {
            return Some((sorted[i], end));
        }
    }
    None
}

/// `(32/α)·exp(−(t − 2R)^{2/l}) + 2α²/(k²γ)²`.
pub fn tail_bound(t: f64, fp: &FilterParams, degree: u32, r: f64) -> f64 {
    let excess = (t - 2.0 * r).max(0.0);
    let s = fp.sparsity() * fp.gamma;
    32.0 / fp.alpha * (-excess.powf(2.0 / degree as f64)).exp() + 2.0 * fp.alpha * fp.alpha / (s * s)
}

/// Smallest attained distance `t > 2R` from `[a, b]` whose empirical tail
/// fraction `Pr[m ≥ t]` exceeds [`tail_bound`].
pub fn find_tail_threshold(
    values: &[f64],
    a: f64,
    b: f64,
    fp: &FilterParams,
    degree: u32,
    r: f64,
) -> Option<f64> {
    let n = values.len() as f64;
    let mut m: Vec<f64> = values.iter().map(|&v| interval_distance(v, a, b)).collect();
    m.sort_by(f64::total_cmp);
    let start = m.partition_point(|&x| x <= 2.0 * r);
    let mut i = start;
    while i < m.len() {
        let t = m[i];
        let tail = (m.len() - i) as f64 / n;
        if tail > tail_bound(t, fp, degree, r) {
            return Some(t);
        }
        while i < m.len() && m[i] == t {
            i += 1;
        }
    }
    None
}

/// A two-way split `T₁ = {p > t − r}`, `T₂ = {p < t + r}` given as positions
/// into the value array.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub t: f64,
    pub r: f64,
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

/// Number of geometric radii tried by [`find_split`].
pub const SPLIT_RADII: usize = 32;

/// Whether part sizes `(n1, n2)` out of `n` pass both split inequalities.
pub fn split_feasible(n: usize, n1: usize, n2: usize, alpha: f64) -> bool {
    let nf = n as f64;
    let squares = (n1 * n1 + n2 * n2) as f64;
    n1 > 0
        && n2 > 0
        && squares <= nf * nf * (1.0 - alpha / 100.0).powi(2)
        && (n - n1.max(n2)) as f64 >= alpha * nf / 4.0
}

/// Searches radii `(range/2)·2^{-j}` from the largest down; for the first
/// radius with a feasible midpoint, returns the midpoint minimizing
/// `|T₁|² + |T₂|²` (smaller `t` on ties).
pub fn find_split(values: &[f64], alpha: f64) -> Option<Split> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let range = sorted.last()? - sorted[0];
    if !(range > 0.0) {
        return None;
    }
    let mids: Vec<f64> = sorted
        .windows(2)
        .filter(|w| w[0] < w[1])
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect();
    let sizes = |t: f64, r: f64| {
        let n1 = n - sorted.partition_point(|&v| v <= t - r);
        let n2 = sorted.partition_point(|&v| v < t + r);
        (n1, n2)
    };
    for j in 0..SPLIT_RADII {
        let r = range / 2.0 * 0.5f64.powi(j as i32);
        let mut best: Option<(usize, f64)> = None;
        for &t in &mids {
            let (n1, n2) = sizes(t, r);
            if split_feasible(n, n1, n2, alpha) {
                let score = n1 * n1 + n2 * n2;
                if best.is_none_or(|(s, _)| score < s) {
                    best = Some((score, t));
                }
            }
        }
        if let Some((_, t)) = best {
            let part1 = (0..n).filter(|&i| values[i] > t - r).collect();
            let part2 = (0..n).filter(|&i| values[i] < t + r).collect();
            return Some(Split { t, r, part1, part2 });
        }
    }
    None
}
