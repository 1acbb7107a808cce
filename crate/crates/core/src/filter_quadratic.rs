//! Filtering along a sparse harmonic quadratic.
//!
//! Before the quadratic itself can be used as a probe, its variance on the
//! good samples has to be certified. That is done through two families of
//! linear probes: the eigenvectors of `AAᵀ`, and the directions
//! `A(x − μ̃)/‖A(x − μ̃)‖` for randomly drawn samples `x`. Only when every one
//! of those passes is the basic filter run on `h_A/β`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::filter_basic::{filter_values, BasicOutcome, NoReason};
use crate::params::FilterParams;
use crate::polynomials::HarmonicQuadratic;
use crate::types::WorkItem;

/// Sample-count constant of the random direction draw.
pub const PHI_CONSTANT: f64 = 200.0;
/// `q(x)` at or below this is treated as zero.
pub const Q_TOL: f64 = 1e-12;
/// Eigenvalues at or below `LAMBDA_REL_TOL · max|λ|` are skipped.
pub const LAMBDA_REL_TOL: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 10_000;

/// The quadratic probe with its normalizer and draw count.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadContext {
    pub probe: HarmonicQuadratic,
    /// `C·ln(1/α)·ln²(2 + ln(1/α))`.
    pub beta: f64,
    /// `⌈200·α⁻¹·ln(4/τ)⌉`.
    pub phi_size: usize,
}

impl QuadContext {
    pub fn new(probe: HarmonicQuadratic, fp: &FilterParams) -> Self {
        let phi = (PHI_CONSTANT / fp.alpha * (4.0 / fp.tau).ln()).ceil().max(1.0);
        Self {
            probe,
            beta: fp.spectral_threshold(),
            phi_size: phi as usize,
        }
    }
}

/// Samples of an item restricted to a coordinate support and shifted:
/// row `r` holds `x_Ω − shift` for `item.subset[r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalView {
    pub support: Vec<usize>,
    pub rows: usize,
    pub values: Vec<f64>,
}

impl LocalView {
    pub fn new(item: &WorkItem, data: &Dataset, support: &[usize], shift: &[f64]) -> Self {
        let m = support.len();
        let mut values = Vec::with_capacity(item.len() * m);
        for &i in &item.subset {
            let x = data.row(i);
            values.extend(support.iter().zip(shift).map(|(&j, s)| x[j] - s));
        }
        Self {
            support: support.to_vec(),
            rows: item.len(),
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.support.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let m = self.width();
        &self.values[r * m..(r + 1) * m]
    }

    /// `y_r · v` for every row.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Runs the two certification stages and then the basic filter on `h_A/β`.
/// Never returns `Yes`: a passing final check is reported as
/// `No(QuadraticYes)`.
pub fn quadratic_multifilter(
    ctx: &QuadContext,
    item: &WorkItem,
    data: &Dataset,
    fp: &FilterParams,
) -> Result<BasicOutcome> {
    let view = LocalView::new(item, data, &ctx.probe.support, &ctx.probe.shift);
    let a = dense(&ctx.probe.dense_local(), view.width());

    let b = &a * a.transpose();
    let out = degree2_homogeneous(&b, &view, item, fp)?;
    if !out.is_yes() {
        return Ok(out);
    }
    let out = multilinear_multifilter(&a, &view, item, fp, ctx.phi_size)?;
    if !out.is_yes() {
        return Ok(out);
    }
    let values: Vec<f64> = (0..view.rows)
        .map(|r| ctx.probe.eval_local(view.row(r)) / ctx.beta)
        .collect();
    Ok(match filter_values(&values, 2, item, fp) {
        BasicOutcome::Yes { .. } => BasicOutcome::No(NoReason::QuadraticYes),
        other => other,
    })
}

fn dense(row_major: &[f64], m: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, m, row_major)
}

/// Eigenpairs of a symmetric matrix sorted by eigenvalue, largest first, with
/// each eigenvector's largest-magnitude entry made positive.
pub fn sorted_eigenpairs(b: &DMatrix<f64>) -> Result<Vec<(f64, Vec<f64>)>> {
    let eig = SymmetricEigen::try_new(b.clone(), f64::EPSILON, EIGEN_MAX_ITER).ok_or(
        Error::NoConvergence {
            solver: "symmetric eigendecomposition",
            iterations: EIGEN_MAX_ITER,
        },
    )?;
    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(c, &l)| {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            fix_sign(&mut v);
            (l, v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(pairs)
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is
/// positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs().partial_cmp(&v[best].abs()) == Some(Ordering::Greater) {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Runs the linear basic filter along each eigenvector of the PSD matrix `b`
/// (given on the view's support), largest eigenvalue first, and returns the
/// first outcome that is not `Yes`.
pub fn degree2_homogeneous(
    b: &DMatrix<f64>,
    view: &LocalView,
    item: &WorkItem,
    fp: &FilterParams,
) -> Result<BasicOutcome> {
    let pairs = sorted_eigenpairs(b)?;
    let nuclear: f64 = pairs.iter().map(|(l, _)| l.abs()).sum();
    if nuclear > 1.0 + 1e-9 {
        return Err(Error::Invariant(format!(
            "degree-2 verifier needs nuclear norm at most 1, got {nuclear}"
        )));
    }
    let max_abs = pairs.iter().map(|(l, _)| l.abs()).fold(0.0, f64::max);
    let tol = LAMBDA_REL_TOL * max_abs;
    let mut last = BasicOutcome::Yes {
        mean: 0.0,
        variance: 0.0,
    };
    for (lambda, v) in pairs {
        if lambda <= tol || max_abs == 0.0 {
            continue;
        }
        let out = filter_values(&view.project(&v), 1, item, fp);
        if !out.is_yes() {
            return Ok(out);
        }
        last = out;
    }
    Ok(last)
}

/// Certifies `E[‖V(x − μ̃)‖²]` through `VᵀV` and then filters along the
/// direction `V(x − μ̃)` of up to `draws` samples drawn with replacement.
pub fn multilinear_multifilter(
    v: &DMatrix<f64>,
    view: &LocalView,
    item: &WorkItem,
    fp: &FilterParams,
    draws: usize,
) -> Result<BasicOutcome> {
    let vtv = v.transpose() * v;
    let out = degree2_homogeneous(&vtv, view, item, fp)?;
    if !out.is_yes() || view.rows == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(item.seed);
    let mut seen = vec![false; view.rows];
    let mut last = out;
    for _ in 0..draws {
        let r = rng.random_range(0..view.rows);
        // A repeated draw yields the same probe and hence the same outcome.
        if std::mem::replace(&mut seen[r], true) {
            continue;
        }
        let y = nalgebra::DVector::from_column_slice(view.row(r));
        let z = v * y;
        let q = z.norm_squared();
        if q <= Q_TOL {
            continue;
        }
        let dir: Vec<f64> = z.iter().map(|c| c / q.sqrt()).collect();
        let out = filter_values(&view.project(&dir), 1, item, fp);
        if !out.is_yes() {
            return Ok(out);
        }
        last = out;
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter_basic::BasicThresholds;
    use crate::types::satisfies_multifilter_condition;
    use rand_distr::StandardNormal;

    fn fp(alpha: f64) -> FilterParams {
        FilterParams {
            alpha,
            tau: 1e-4,
            k: 3,
            d: 10,
            big_c: 10.0,
            gamma: ((10.0 * 3.0 / alpha) * (1e4f64).ln()).ln(),
        }
    }

    fn gaussian(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
            .collect()
    }

    fn view_all(data: &Dataset, support: &[usize]) -> (WorkItem, LocalView) {
        let item = WorkItem::new(data.all_indices(), 0.25).with_seed(5);
        let view = LocalView::new(&item, data, support, &vec![0.0; support.len()]);
        (item, view)
    }

    #[test]
    fn zero_matrix_is_vacuous() {
        let data = Dataset::from_rows(&gaussian(50, 4, 1)).unwrap();
        let (item, view) = view_all(&data, &[0, 1]);
        let z = DMatrix::zeros(2, 2);
        assert!(degree2_homogeneous(&z, &view, &item, &fp(0.25)).unwrap().is_yes());
        assert!(multilinear_multifilter(&z, &view, &item, &fp(0.25), 100).unwrap().is_yes());
    }

    #[test]
    fn clean_data_passes_single_direction() {
        let data = Dataset::from_rows(&gaussian(2000, 4, 2)).unwrap();
        let (item, view) = view_all(&data, &[0, 1]);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(degree2_homogeneous(&b, &view, &item, &fp(0.25)).unwrap().is_yes());
    }

    #[test]
    fn clean_data_passes_multilinear_across_seeds() {
        for seed in 0..100 {
            let data = Dataset::from_rows(&gaussian(400, 3, 100 + seed)).unwrap();
            let item = WorkItem::new(data.all_indices(), 0.25).with_seed(seed);
            let view = LocalView::new(&item, &data, &[0], &[0.0]);
            let v = DMatrix::from_row_slice(1, 1, &[1.0]);
            let out = multilinear_multifilter(&v, &view, &item, &fp(0.25), 50).unwrap();
            assert!(out.is_yes(), "seed {seed}: {out:?}");
        }
    }

    #[test]
    fn nuclear_norm_is_checked() {
        let data = Dataset::from_rows(&gaussian(20, 2, 3)).unwrap();
        let (item, view) = view_all(&data, &[0, 1]);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        assert!(matches!(
            degree2_homogeneous(&b, &view, &item, &fp(0.25)),
            Err(Error::Invariant(_))
        ));
    }

    fn with_outliers(n: usize, frac: f64, coord: usize, at: f64, seed: u64) -> Dataset {
        let mut rows = gaussian(n, 4, seed);
        let bad = (frac * n as f64) as usize;
        for row in rows.iter_mut().take(bad) {
            row[coord] = at;
        }
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn largest_eigenvalue_probed_first() {
        // Rows 0..100 are far out on coordinate 0 and rows 100..200 on
        // coordinate 1. Coordinate 1 has the larger eigenvalue, so its
        // outliers are the ones split off.
        let p = fp(0.25);
        let at = BasicThresholds::new(&p, 1).value_cap * 0.75;
        let mut rows = gaussian(1000, 4, 4);
        for (r, row) in rows.iter_mut().enumerate().take(200) {
            row[r / 100] = at;
        }
        let data = Dataset::from_rows(&rows).unwrap();
        let (item, view) = view_all(&data, &[0, 1]);
        let b = DMatrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 0.6]);
        let out = degree2_homogeneous(&b, &view, &item, &p).unwrap();
        let children = out.children();
        assert!(!children.is_empty(), "{out:?}");
        assert!(satisfies_multifilter_condition(&item, &children));
        let excluded = |c: &WorkItem, rows: std::ops::Range<usize>| {
            rows.filter(|i| c.subset.binary_search(i).is_err()).count()
        };
        assert!(children
            .iter()
            .any(|c| excluded(c, 100..200) >= 90 && excluded(c, 0..100) <= 10));
    }

    #[test]
    fn sampled_direction_finds_cluster() {
        let p = fp(0.25);
        let at = BasicThresholds::new(&p, 1).value_cap * 0.75;
        let data = with_outliers(1000, 0.1, 0, at, 6);
        let item = WorkItem::new(data.all_indices(), 0.25).with_seed(9);
        let view = LocalView::new(&item, &data, &[0], &[0.0]);
        let v = DMatrix::from_row_slice(1, 1, &[1.0]);
        let out = multilinear_multifilter(&v, &view, &item, &p, 50).unwrap();
        assert!(!out.children().is_empty(), "{out:?}");
    }

    #[test]
    fn quadratic_never_says_yes() {
        let p = fp(0.25);
        let cells = [(0, 1, 1.0)];
        for seed in 0..10 {
            let data = Dataset::from_rows(&gaussian(300, 3, 40 + seed)).unwrap();
            let probe = HarmonicQuadratic::from_cells(&cells, &[0.0; 3]).unwrap();
            let ctx = QuadContext::new(probe, &p);
            let item = WorkItem::new(data.all_indices(), 0.25).with_seed(seed);
            let out = quadratic_multifilter(&ctx, &item, &data, &p).unwrap();
            assert!(!out.is_yes());
        }
    }

    #[test]
    fn diagonal_cell_with_far_points_splits() {
        let p = fp(0.25);
        let data = with_outliers(1000, 0.1, 1, 1e3, 8);
        let probe = HarmonicQuadratic::from_cells(&[(1, 1, 1.0)], &[0.0; 4]).unwrap();
        let ctx = QuadContext::new(probe, &p);
        let item = WorkItem::new(data.all_indices(), 0.25).with_seed(1);
        let out = quadratic_multifilter(&ctx, &item, &data, &p).unwrap();
        assert!(!out.is_yes());
    }

    #[test]
    fn sign_fix_and_ordering() {
        let b = DMatrix::from_row_slice(2, 2, &[0.2, 0.0, 0.0, 0.7]);
        let pairs = sorted_eigenpairs(&b).unwrap();
        assert!((pairs[0].0 - 0.7).abs() < 1e-12);
        assert!((pairs[0].1[1] - 1.0).abs() < 1e-12);
        let mut v = vec![0.1, -0.9, 0.3];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }
}
