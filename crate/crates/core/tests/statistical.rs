//! Seeded statistical checks of the individual stages.

use listdec::filter_basic::filter_values;
use listdec::filter_quadratic::{quadratic_multifilter, QuadContext};
use listdec::multifilter::{leading_eig, moment_summary};
use listdec::polynomials::gauss_hermite;
use listdec::{
    cluster, generate, linf_diameter, BasicOutcome, CorruptionModel, EstimationParams, HarmonicQuadratic,
    NoReason, WorkItem,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[test]
fn clusters_recall_inliers_and_stay_bounded() {
    let (d, k, n, alpha) = (20, 2, 1000, 0.1);
    let params = EstimationParams::new(alpha, 0.1, k, d, 10.0).unwrap();
    let unit = params.big_c() * params.gamma().sqrt();
    let mut recalled = 0;
    for seed in 0..100 {
        let mut far = vec![0.0; d];
        far[seed as usize % d] = 150.0 * unit;
        let g = generate(d, k, n, alpha, 3.0, &CorruptionModel::PointMass(far), seed).unwrap();
        let out = cluster(&g.dataset, &params);
        assert!(out.subsets.len() <= (1.0 / alpha).ceil() as usize, "seed {seed}");
        for s in &out.subsets {
            assert!(linf_diameter(s, &g.dataset).unwrap() <= 12.0 * unit, "seed {seed}");
        }
        let inliers: Vec<usize> = (0..n).filter(|&i| g.inlier_mask[i]).collect();
        let need = (1.0 - alpha / 50.0) * inliers.len() as f64;
        if out.subsets.iter().any(|s| {
            inliers.iter().filter(|i| s.subset.binary_search(i).is_ok()).count() as f64 >= need
        }) {
            recalled += 1;
        }
    }
    assert!(recalled >= 95, "{recalled}/100");
}

#[test]
fn one_way_splits_spare_inliers() {
    // 96% standard normal inliers and a far 4% group; see the unit example
    // for why these proportions and parameters.
    let alpha = 0.1;
    let mut fp = EstimationParams::new(alpha, 1e-6, 12, 1000, 10.0).unwrap().for_item(alpha, 1e-6);
    fp.tau = 1e-6;
    let item = WorkItem::new((0..1000).collect(), alpha);
    let (mut ok, mut splits) = (0, 0);
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..960).map(|_| gaussian(&mut rng)).collect();
        v.extend((0..40).map(|_| 120.0 + gaussian(&mut rng)));
        if let BasicOutcome::SplitOne(child) = filter_values(&v, 1, &item, &fp) {
            splits += 1;
            let removed = 1000 - child.len();
            let inliers_removed = (0..960).filter(|i| child.subset.binary_search(i).is_err()).count();
            if inliers_removed as f64 <= alpha / 8.0 * removed as f64 {
                ok += 1;
            }
        }
    }
    assert!(splits >= 190, "{splits}");
    assert!(ok as f64 >= 0.95 * 200.0, "{ok}/200");
}

#[test]
fn harmonic_probe_has_no_low_order_terms() {
    let (nodes, weights) = gauss_hermite(12);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let cells: Vec<(usize, usize, f64)> = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
            .iter()
            .map(|&(i, j)| (i, j, gaussian(&mut rng)))
            .collect();
        let q = HarmonicQuadratic::from_cells(&cells, &[0.0; 3]).unwrap();
        let (mut m0, mut m1, mut m2) = (0.0, [0.0; 3], 0.0);
        for (a, wa) in nodes.iter().zip(&weights) {
            for (b, wb) in nodes.iter().zip(&weights) {
                for (c, wc) in nodes.iter().zip(&weights) {
                    let w = wa * wb * wc;
                    let x = [*a, *b, *c];
                    let h = q.eval(&x);
                    m0 += w * h;
                    for i in 0..3 {
                        m1[i] += w * h * x[i];
                    }
                    m2 += w * h * h;
                }
            }
        }
        assert!(m0.abs() < 1e-10, "{m0}");
        assert!(m1.iter().all(|v| v.abs() < 1e-10), "{m1:?}");
        assert!((m2 - 1.0).abs() < 1e-10, "{m2}");
    }
}

fn dense_centered_cov(data: &listdec::Dataset) -> DMatrix<f64> {
    let (n, d) = (data.n(), data.d());
    let mut mean = vec![0.0; d];
    for r in data.rows() {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v / n as f64;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for r in data.rows() {
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += (r[i] - mean[i]) * (r[j] - mean[j]) / n as f64;
            }
        }
    }
    cov - DMatrix::identity(d, d)
}

#[test]
fn spectral_bound_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..20u64 {
        let d = rng.random_range(6..50);
        let k = rng.random_range(2..5);
        let model = if trial % 2 == 0 {
            CorruptionModel::MirroredMean
        } else {
            CorruptionModel::PairCorrelation { i: 0, j: 1, rho: 0.9 }
        };
        let g = generate(d, k, 400, 0.2, 3.0, &model, trial).unwrap();
        let item = WorkItem::new((0..400).collect(), 0.2);
        let s = moment_summary(&item, &g.dataset, k).unwrap();
        let m = s.omega.len();
        let (lambda, _) = leading_eig(&s.block, m, 1e-13).unwrap();
        assert!(lambda <= s.frob_selected * (1.0 + 1e-9), "trial {trial}");

        let dense = dense_centered_cov(&g.dataset);
        for _ in 0..10 {
            let pick = rand::seq::index::sample(&mut rng, m, k.min(m)).into_vec();
            let sub: Vec<usize> = pick.iter().map(|&p| s.omega[p]).collect();
            let block = DMatrix::from_fn(sub.len(), sub.len(), |a, b| dense[(sub[a], sub[b])]);
            let spectral = block.symmetric_eigenvalues().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            assert!(spectral <= s.frob_selected * (1.0 + 1e-9) + 1e-9, "trial {trial}: {spectral} > {}", s.frob_selected);
        }
    }
}

#[test]
fn certified_quadratic_probes_have_bounded_variance() {
    let (d, k, n, alpha) = (30, 3, 2000, 0.25);
    let params = EstimationParams::new(alpha, 0.1, k, d, 10.0).unwrap();
    let (mut certified, mut ok) = (0, 0);
    for seed in 0..100 {
        let g = generate(d, k, n, 0.5, 2.0, &CorruptionModel::MirroredMean, seed).unwrap();
        let item = WorkItem::new((0..n).collect(), alpha).with_seed(seed);
        let fp = params.for_item(alpha, 0.1 / n as f64);
        let s = moment_summary(&item, &g.dataset, k).unwrap();
        let probe = HarmonicQuadratic::from_cells(&s.cells(), &s.mean).unwrap();
        let ctx = QuadContext::new(probe.clone(), &fp);
        if quadratic_multifilter(&ctx, &item, &g.dataset, &fp).unwrap() != BasicOutcome::No(NoReason::QuadraticYes) {
            continue;
        }
        certified += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let draws = 20_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let x: Vec<f64> = g.true_mean.iter().map(|m| m + gaussian(&mut rng)).collect();
            acc += probe.eval(&x).powi(2);
        }
        if acc / draws as f64 <= 4.0 * ctx.beta * ctx.beta {
            ok += 1;
        }
    }
    assert!(certified >= 50, "{certified}");
    assert!(ok as f64 >= 0.95 * certified as f64, "{ok}/{certified}");
}
