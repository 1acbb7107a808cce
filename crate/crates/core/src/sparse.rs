use std::cmp::Ordering;

use crate::error::{param, Result};

/// Keeps the `k` largest-magnitude entries of `v` and zeroes the rest.
/// Equal magnitudes keep the lower index.
pub fn hard_threshold(v: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > v.len() {
        return param(format!("hard threshold needs 1 <= k <= {}, got {k}", v.len()));
    }
    let mut out = vec![0.0; v.len()];
    for i in top_k_indices(v, k) {
        out[i] = v[i];
    }
    Ok(out)
}

/// Indices of the `k` largest `|v_i|`, lower index first on ties.
pub(crate) fn top_k_indices(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let by_magnitude =
        |&a: &usize, &b: &usize| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b));
    if k < idx.len() {
        idx.select_nth_unstable_by(k, by_magnitude);
        idx.truncate(k);
    }
    idx.sort_unstable_by(by_magnitude);
    idx
}

/// Number of nonzero entries.
pub fn support_size(v: &[f64]) -> usize {
    v.iter().filter(|x| **x != 0.0).count()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lexicographic total order on vectors, used to canonicalize candidate lists.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}
