//! List-decodable learning of origin-centered sparse halfspaces.
//!
//! For `x ~ N(0, I)` and `y = sign(w*·x)` with unit `w*`, the vector
//! `z = √(π/2)·y·x` has mean `w*`. Running the mean estimator on the `z`
//! values therefore yields candidate normals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::datagen::sparse_signed_vector;
use crate::error::{param, Result};
use crate::orchestrator::{run_list_decode, RunOptions, RunTrace};
use crate::params::EstimationParams;
use crate::sparse::{dot, l2_norm};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    /// `+1` or `-1`.
    pub y: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceHypothesis {
    pub w: Vec<f64>,
    pub normalized: bool,
}

impl HalfspaceHypothesis {
    pub fn predict(&self, x: &[f64]) -> i8 {
        if dot(&self.w, x) >= 0.0 {
            1
        } else {
            -1
        }
    }
}

/// `z_i = √(π/2)·y_i·x_i`, in input order.
pub fn reduce_to_mean(samples: &[LabeledSample]) -> Result<Dataset> {
    let Some(first) = samples.first() else {
        return param("no samples to reduce");
    };
    let d = first.x.len();
    let scale = (std::f64::consts::PI / 2.0).sqrt();
    let mut values = Vec::with_capacity(samples.len() * d);
    for s in samples {
        if s.x.len() != d {
            return param("samples have mixed dimensions");
        }
        if s.y != 1 && s.y != -1 {
            return param(format!("labels must be +1 or -1, got {}", s.y));
        }
        values.extend(s.x.iter().map(|v| scale * s.y as f64 * v));
    }
    Dataset::new(samples.len(), d, values)
}

/// Runs the mean estimator on the reduced samples and returns every reduced
/// candidate as an (unnormalized) hypothesis. Assumes `x ~ N(0, I)` on the
/// inliers.
pub fn learn_halfspaces(
    samples: &[LabeledSample],
    params: &EstimationParams,
    options: &RunOptions,
) -> Result<(Vec<HalfspaceHypothesis>, RunTrace)> {
    let data = reduce_to_mean(samples)?;
    let (list, trace) = run_list_decode(&data, params, options)?;
    let hyps = list
        .reduced
        .into_iter()
        .map(|w| HalfspaceHypothesis {
            w,
            normalized: false,
        })
        .collect();
    Ok((hyps, trace))
}

/// `Pr_{x~N(0,I)}[sign(w₁·x) ≠ sign(w₂·x)] = arccos(⟨ŵ₁, ŵ₂⟩)/π`.
pub fn disagreement(w1: &[f64], w2: &[f64]) -> Result<f64> {
    let (n1, n2) = (l2_norm(w1), l2_norm(w2));
    if n1 == 0.0 || n2 == 0.0 {
        return param("disagreement of a zero vector");
    }
    let c = (dot(w1, w2) / (n1 * n2)).clamp(-1.0, 1.0);
    Ok(c.acos() / std::f64::consts::PI)
}

/// How the non-inlier samples are labeled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfspaceAdversary {
    /// `x ~ N(0, I)` with the true label negated.
    LabelFlip,
    /// `x ~ N(m·u, I)` with `u` a unit `k`-sparse direction off the support
    /// of `w*`, always labeled `+1`.
    ShiftedDecoy { magnitude: f64 },
    /// `x ~ N(0, I)` with a fair random label.
    RandomLabels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceData {
    pub samples: Vec<LabeledSample>,
    pub w_star: Vec<f64>,
    pub inlier_mask: Vec<bool>,
}

/// `⌈2αn⌉` realizable samples around a unit `k`-sparse `w*`, the rest from
/// the adversary, interleaved in seeded order.
pub fn generate_halfspace(
    d: usize,
    k: usize,
    n: usize,
    alpha: f64,
    adversary: HalfspaceAdversary,
    seed: u64,
) -> Result<HalfspaceData> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return param(format!("alpha must lie in (0, 1/2], got {alpha}"));
    }
    if k == 0 || 2 * k > d {
        return param("need 1 <= k and 2k <= d");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = sparse_signed_vector(d, k, 1.0, &mut rng);
    let w_star: Vec<f64> = raw.iter().map(|v| v / (k as f64).sqrt()).collect();
    let free: Vec<usize> = (0..d).filter(|&i| w_star[i] == 0.0).collect();
    let mut u = vec![0.0; d];
    for i in rand::seq::index::sample(&mut rng, free.len(), k) {
        u[free[i]] = 1.0 / (k as f64).sqrt();
    }

    let inliers = crate::datagen::inlier_count(n, alpha);
    let mut mask = vec![false; n];
    let mut positions: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(positions.as_mut_slice(), &mut rng);
    for &p in &positions[..inliers] {
        mask[p] = true;
    }
    let label = |w: &[f64], x: &[f64]| if dot(w, x) >= 0.0 { 1i8 } else { -1 };
    let samples = (0..n)
        .map(|i| {
            let mut x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let truth = label(&w_star, &x);
            let y = if mask[i] {
                truth
            } else {
                match adversary {
                    HalfspaceAdversary::LabelFlip => -truth,
                    HalfspaceAdversary::ShiftedDecoy { magnitude } => {
                        for (xi, ui) in x.iter_mut().zip(&u) {
                            *xi += magnitude * ui;
                        }
                        1
                    }
                    HalfspaceAdversary::RandomLabels => {
                        if rng.random_bool(0.5) {
                            1
                        } else {
                            -1
                        }
                    }
                }
            };
            LabeledSample { x, y }
        })
        .collect();
    Ok(HalfspaceData {
        samples,
        w_star,
        inlier_mask: mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_examples() {
        let s = [
            LabeledSample { x: vec![1.0, 0.0], y: -1 },
            LabeledSample { x: vec![0.0, 0.0], y: 1 },
        ];
        let data = reduce_to_mean(&s).unwrap();
        assert_eq!(data.row(0), &[-(std::f64::consts::PI / 2.0).sqrt(), -0.0]);
        assert_eq!(data.row(1), &[0.0, 0.0]);
        assert!(reduce_to_mean(&[]).is_err());
    }

    #[test]
    fn reduced_mean_is_normal_vector() {
        let g = generate_halfspace(10, 1, 100_000, 0.5, HalfspaceAdversary::LabelFlip, 1).unwrap();
        let data = reduce_to_mean(&g.samples).unwrap();
        let mut m = vec![0.0; 10];
        for r in data.rows() {
            for (a, b) in m.iter_mut().zip(r) {
                *a += b / 1e5;
            }
        }
        for (a, b) in m.iter().zip(&g.w_star) {
            assert!((a - b).abs() < 0.05, "{m:?} vs {:?}", g.w_star);
        }
    }

    #[test]
    fn disagreement_examples() {
        assert_eq!(disagreement(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        // Orthogonal normals disagree on half of the Gaussian mass.
        assert!((disagreement(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!((disagreement(&[1.0, 0.0], &[-3.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(disagreement(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn disagreement_below_half_chord() {
        for a in 0..=200 {
            let t = std::f64::consts::PI * a as f64 / 200.0;
            let w = [t.cos(), t.sin()];
            let chord = ((w[0] - 1.0).powi(2) + w[1].powi(2)).sqrt();
            assert!(disagreement(&[1.0, 0.0], &w).unwrap() <= chord / 2.0 + 1e-9);
        }
    }

    #[test]
    fn generator_shapes() {
        let g = generate_halfspace(20, 3, 1000, 0.25, HalfspaceAdversary::RandomLabels, 2).unwrap();
        assert_eq!(g.inlier_mask.iter().filter(|&&b| b).count(), 500);
        assert!((l2_norm(&g.w_star) - 1.0).abs() < 1e-12);
        for (s, &inl) in g.samples.iter().zip(&g.inlier_mask) {
            if inl {
                assert_eq!(s.y, if dot(&g.w_star, &s.x) >= 0.0 { 1 } else { -1 });
            }
        }
        let h = HalfspaceHypothesis { w: g.w_star.clone(), normalized: true };
        assert_eq!(h.predict(&g.w_star), 1);
    }
}
