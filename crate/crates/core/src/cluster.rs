//! Coarse ℓ∞ clustering of the raw dataset.
//!
//! A point becomes a center when at least `⌈αn⌉` points (itself included) lie
//! within `2C√γ` of it and no earlier center lies within `6C√γ`. Each center
//! then claims every point within `6C√γ`. Clusters may overlap unless
//! [`ClusterOptions::strict_partition`] is set.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{param, Result};
use crate::params::EstimationParams;
use crate::types::WorkItem;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClusterOptions {
    /// Assign each point only to the first center that claims it.
    pub strict_partition: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutput {
    /// One item per center, each carrying purity `α/2`.
    pub subsets: Vec<WorkItem>,
    /// Dataset indices of the centers, in selection order.
    pub centers: Vec<usize>,
    /// Neighbor radius `2C√γ`.
    pub inner_radius: f64,
    /// Claim and exclusion radius `6C√γ`.
    pub outer_radius: f64,
}

/// Pairwise ℓ∞ distance.
pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn within(a: &[f64], b: &[f64], radius: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= radius)
}

pub fn cluster(data: &Dataset, params: &EstimationParams) -> ClusterOutput {
    cluster_with(data, params, ClusterOptions::default())
}

pub fn cluster_with(
    data: &Dataset,
    params: &EstimationParams,
    options: ClusterOptions,
) -> ClusterOutput {
    let unit = params.big_c() * params.gamma().max(0.0).sqrt();
    let inner = 2.0 * unit;
    let outer = 6.0 * unit;
    let n = data.n();
    let need = ((params.alpha() * n as f64).ceil() as usize).max(1);

    // Neighbor counts are independent per point; only the center fold below
    // depends on scan order.
    let dense: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = data.row(i);
            let mut count = 0;
            for j in 0..n {
                if within(x, data.row(j), inner) {
                    count += 1;
                    if count >= need {
                        return true;
                    }
                }
            }
            false
        })
        .collect();

    let mut centers: Vec<usize> = Vec::new();
    for i in (0..n).filter(|&i| dense[i]) {
        let x = data.row(i);
        if centers.iter().all(|&c| !within(x, data.row(c), outer)) {
            centers.push(i);
        }
    }

    let mut taken = vec![false; n];
    let subsets = centers
        .iter()
        .map(|&c| {
            let center = data.row(c);
            let members: Vec<usize> = (0..n)
                .filter(|&j| {
                    !(options.strict_partition && taken[j]) && within(center, data.row(j), outer)
                })
                .collect();
            if options.strict_partition {
                for &j in &members {
                    taken[j] = true;
                }
            }
            WorkItem::new(members, params.alpha() / 2.0)
        })
        .collect();

    ClusterOutput {
        subsets,
        centers,
        inner_radius: inner,
        outer_radius: outer,
    }
}

/// `max_j (max_i x_ij − min_i x_ij)` over the subset.
pub fn linf_diameter(subset: &WorkItem, data: &Dataset) -> Result<f64> {
    let Some(&first) = subset.subset.first() else {
        return param("diameter of an empty subset");
    };
    let mut lo = data.row(first).to_vec();
    let mut hi = lo.clone();
    for &i in &subset.subset[1..] {
        for (j, &v) in data.row(i).iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    Ok(hi.iter().zip(&lo).map(|(h, l)| h - l).fold(0.0, f64::max))
}
