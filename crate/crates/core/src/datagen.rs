//! Seeded synthetic data: Gaussian inliers around a sparse mean, plus
//! adversarial outliers, with ground truth kept for evaluation.
//!
//! Every point draws from its own ChaCha8 stream (`seed`, stream = point
//! index), so generation is deterministic regardless of evaluation order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{param, Result};

/// How the non-inlier points are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum CorruptionModel {
    /// Every outlier sits at the given location.
    PointMass(Vec<f64>),
    /// Outliers ~ `N(−μ, I)`.
    MirroredMean,
    /// Outliers cycle over `N(mean_c, s·I)` for the listed means.
    DecoyClusters { means: Vec<Vec<f64>>, cov_scale: f64 },
    /// Outliers uniform on `μ + [−r, r]^d`.
    HypercubeNoise(f64),
    /// Outliers ~ `N(μ, I)` except coordinates `i` and `j` have correlation
    /// `rho`.
    PairCorrelation { i: usize, j: usize, rho: f64 },
}

impl CorruptionModel {
    fn validate(&self, d: usize) -> Result<()> {
        match self {
            CorruptionModel::PointMass(loc) if loc.len() != d => {
                param("point-mass location has the wrong dimension")
            }
            CorruptionModel::PointMass(loc) if loc.iter().any(|x| !x.is_finite()) => {
                param("point-mass location must be finite")
            }
            CorruptionModel::DecoyClusters { means, cov_scale } => {
                if means.is_empty() {
                    return param("decoy clusters need at least one mean");
                }
                if means.iter().any(|m| m.len() != d) {
                    return param("decoy mean has the wrong dimension");
                }
                if !(*cov_scale > 0.0 && cov_scale.is_finite()) {
                    return param("decoy covariance scale must be positive");
                }
                Ok(())
            }
            CorruptionModel::HypercubeNoise(r) if !(*r > 0.0 && r.is_finite()) => {
                param("hypercube radius must be positive")
            }
            CorruptionModel::PairCorrelation { i, j, rho } => {
                if i == j || *i >= d || *j >= d {
                    return param("pair correlation needs two distinct in-range coordinates");
                }
                if !(rho.abs() < 1.0) {
                    return param("correlation must lie in (-1, 1)");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub dataset: Dataset,
    pub inlier_mask: Vec<bool>,
    pub true_mean: Vec<f64>,
    pub seed: u64,
}

impl LabeledDataset {
    pub fn inlier_count(&self) -> usize {
        self.inlier_mask.iter().filter(|&&b| b).count()
    }
}

/// `⌈2αn⌉`.
pub fn inlier_count(n: usize, alpha: f64) -> usize {
    ((2.0 * alpha * n as f64).ceil() as usize).min(n)
}

/// Stream id reserved for the mean and shuffle draws; point streams use
/// their index.
const META_STREAM: u64 = u64::MAX;

fn meta_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(META_STREAM);
    rng
}

fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A `k`-sparse vector with seeded support and entries `±magnitude`.
pub fn sparse_signed_vector(d: usize, k: usize, magnitude: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut v = vec![0.0; d];
    for i in rand::seq::index::sample(rng, d, k) {
        v[i] = if rng.random_bool(0.5) { magnitude } else { -magnitude };
    }
    v
}

/// `count` random `k`-sparse decoy means with entries `±magnitude`.
pub fn random_decoys(d: usize, k: usize, count: usize, magnitude: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(META_STREAM - 1);
    (0..count)
        .map(|_| sparse_signed_vector(d, k, magnitude, &mut rng))
        .collect()
}

pub fn generate(
    d: usize,
    k: usize,
    n: usize,
    alpha: f64,
    mu_magnitude: f64,
    model: &CorruptionModel,
    seed: u64,
) -> Result<LabeledDataset> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return param(format!("alpha must lie in (0, 1/2], got {alpha}"));
    }
    if k == 0 || k > d {
        return param(format!("need 1 <= k <= d, got k={k}, d={d}"));
    }
    if n == 0 {
        return param("need at least one sample");
    }
    if !mu_magnitude.is_finite() {
        return param("mean magnitude must be finite");
    }
    model.validate(d)?;

    let mut meta = meta_rng(seed);
    let mu = sparse_signed_vector(d, k, mu_magnitude, &mut meta);
    let inliers = inlier_count(n, alpha);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut meta);

    // Slot s (in generation order) lands at position order[s]; the first
    // `inliers` slots are inliers.
    let points: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut rng = point_rng(seed, s);
            if s < inliers {
                gaussian_around(&mu, 1.0, &mut rng)
            } else {
                outlier(model, &mu, s - inliers, &mut rng)
            }
        })
        .collect();

    let mut values = vec![0.0; n * d];
    let mut mask = vec![false; n];
    for (s, p) in points.into_iter().enumerate() {
        let pos = order[s];
        values[pos * d..(pos + 1) * d].copy_from_slice(&p);
        mask[pos] = s < inliers;
    }
    Ok(LabeledDataset {
        dataset: Dataset::new(n, d, values)?,
        inlier_mask: mask,
        true_mean: mu,
        seed,
    })
}

fn gaussian_around(center: &[f64], scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    center
        .iter()
        .map(|c| c + scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn outlier(model: &CorruptionModel, mu: &[f64], rank: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match model {
        CorruptionModel::PointMass(loc) => loc.clone(),
        CorruptionModel::MirroredMean => {
            let neg: Vec<f64> = mu.iter().map(|m| -m).collect();
            gaussian_around(&neg, 1.0, rng)
        }
        CorruptionModel::DecoyClusters { means, cov_scale } => {
            gaussian_around(&means[rank % means.len()], cov_scale.sqrt(), rng)
        }
        CorruptionModel::HypercubeNoise(r) => {
            mu.iter().map(|m| m + rng.random_range(-r..=*r)).collect()
        }
        CorruptionModel::PairCorrelation { i, j, rho } => {
            let mut x = gaussian_around(mu, 1.0, rng);
            let zi = x[*i] - mu[*i];
            let zj = x[*j] - mu[*j];
            x[*j] = mu[*j] + rho * zi + (1.0 - rho * rho).sqrt() * zj;
            x
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column_means(data: &Dataset) -> Vec<f64> {
        let mut m = vec![0.0; data.d()];
        for r in data.rows() {
            for (a, b) in m.iter_mut().zip(r) {
                *a += b / data.n() as f64;
            }
        }
        m
    }

    #[test]
    fn all_inliers_mean_concentrates() {
        let (d, n) = (20, 4000);
        let g = generate(d, 3, n, 0.5, 5.0, &CorruptionModel::MirroredMean, 1).unwrap();
        assert_eq!(g.inlier_count(), n);
        let m = column_means(&g.dataset);
        let err = crate::sparse::l2_distance(&m, &g.true_mean);
        assert!(err <= 4.0 * (d as f64 / n as f64).sqrt(), "{err}");
        assert_eq!(crate::sparse::support_size(&g.true_mean), 3);
    }

    #[test]
    fn mirrored_mean_is_centered() {
        // Equal inlier and outlier counts need α = 1/4 under the ⌈2αn⌉ rule.
        let (d, n) = (30, 4000);
        let g = generate(d, 4, n, 0.25, 5.0, &CorruptionModel::MirroredMean, 2).unwrap();
        assert_eq!(g.inlier_count(), n / 2);
        let m = column_means(&g.dataset);
        let bound = 5.0 / (n as f64).sqrt() * (d as f64).ln().sqrt();
        assert!(m.iter().all(|x| x.abs() <= bound), "{m:?}");
    }

    #[test]
    fn point_mass_is_placed() {
        let mut loc = vec![0.0; 5];
        loc[0] = 1e6;
        let g = generate(5, 1, 100, 0.1, 1.0, &CorruptionModel::PointMass(loc), 3).unwrap();
        let max = g.dataset.as_slice().iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - 1e6).abs() < 10.0);
        assert_eq!(g.inlier_count(), 20);
    }

    #[test]
    fn reproducible_bytes() {
        let model = CorruptionModel::HypercubeNoise(3.0);
        let a = generate(10, 2, 300, 0.2, 2.0, &model, 9).unwrap();
        let b = generate(10, 2, 300, 0.2, 2.0, &model, 9).unwrap();
        assert_eq!(a, b);
        let c = generate(10, 2, 300, 0.2, 2.0, &model, 10).unwrap();
        assert_ne!(a.dataset, c.dataset);
    }

    #[test]
    fn invalid_models_are_rejected() {
        let bad = [
            CorruptionModel::PointMass(vec![0.0; 2]),
            CorruptionModel::DecoyClusters { means: vec![], cov_scale: 1.0 },
            CorruptionModel::DecoyClusters { means: vec![vec![0.0; 4]], cov_scale: 0.0 },
            CorruptionModel::HypercubeNoise(-1.0),
            CorruptionModel::PairCorrelation { i: 1, j: 1, rho: 0.5 },
            CorruptionModel::PairCorrelation { i: 0, j: 1, rho: 1.0 },
        ];
        for m in &bad {
            assert!(generate(4, 1, 10, 0.25, 1.0, m, 0).is_err(), "{m:?}");
        }
        assert!(generate(4, 1, 10, 0.6, 1.0, &CorruptionModel::MirroredMean, 0).is_err());
    }

    #[test]
    fn pair_correlation_is_planted() {
        let model = CorruptionModel::PairCorrelation { i: 1, j: 3, rho: 0.9 };
        let g = generate(5, 1, 20_000, 0.05, 0.0, &model, 4).unwrap();
        let rows: Vec<&[f64]> = g
            .dataset
            .rows()
            .zip(&g.inlier_mask)
            .filter(|(_, &inl)| !inl)
            .map(|(r, _)| r)
            .collect();
        let c: f64 = rows.iter().map(|r| r[1] * r[3]).sum::<f64>() / rows.len() as f64;
        assert!((c - 0.9).abs() < 0.03, "{c}");
    }

    #[test]
    fn inlier_tails_are_rare() {
        let (d, n, alpha) = (50, 2000, 0.25);
        for seed in 0..100 {
            let g = generate(d, 3, n, alpha, 3.0, &CorruptionModel::MirroredMean, seed).unwrap();
            let n_in = g.inlier_count();
            let radius = (2.0 * (100.0 * d as f64 * n_in as f64 / alpha).ln()).sqrt();
            let far = g
                .dataset
                .rows()
                .zip(&g.inlier_mask)
                .filter(|(r, &inl)| {
                    inl && crate::cluster::linf_distance(r, &g.true_mean) > radius
                })
                .count();
            assert!(far as f64 <= alpha / 50.0 * n_in as f64, "seed {seed}: {far}");
        }
    }
}
