//! Hermite polynomials and the sparse probes the filters evaluate.
//!
//! Two probe shapes exist:
//!
//! * [`SparseLinear`]: `v · (x − shift)` on a sorted coordinate support.
//! * [`HarmonicQuadratic`]: the degree-2 harmonic polynomial
//!   `h_A(y) = (yᵀAy − tr A)/√2` of `y = x − shift`, for a symmetric `A`
//!   with unit Frobenius norm stored as its upper triangle.
//!
//! Both evaluate in `O(|support| + cells)`; nothing is ever expanded to a
//! dense `d × d` matrix.

use std::f64::consts::SQRT_2;

use crate::error::{param, Result};

/// Largest Hermite index accepted by [`hermite_eval`].
pub const MAX_HERMITE_DEGREE: usize = 64;

/// Probabilists' Hermite polynomial `He_a(x)` by the three-term recurrence
/// `He_{a+1}(x) = x·He_a(x) − a·He_{a−1}(x)`.
pub fn hermite_eval(a: usize, x: f64) -> Result<f64> {
    if a > MAX_HERMITE_DEGREE {
        return param(format!(
            "Hermite degree {a} exceeds the supported maximum {MAX_HERMITE_DEGREE}"
        ));
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..a {
        let next = x * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `v · (x − shift)` restricted to `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLinear {
    pub support: Vec<usize>,
    pub coeffs: Vec<f64>,
    /// Offset on `support`, aligned with `coeffs`.
    pub shift: Vec<f64>,
}

impl SparseLinear {
    pub fn new(support: Vec<usize>, coeffs: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        check_support(&support)?;
        if coeffs.len() != support.len() || shift.len() != support.len() {
            return param("linear probe coefficients and shift must align with its support");
        }
        Ok(Self {
            support,
            coeffs,
            shift,
        })
    }

    /// Unshifted coordinate projection `x ↦ x_i`.
    pub fn coordinate(i: usize) -> Self {
        Self {
            support: vec![i],
            coeffs: vec![1.0],
            shift: vec![0.0],
        }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coeffs)
            .zip(&self.shift)
            .map(|((&i, c), s)| c * (x[i] - s))
            .sum()
    }
}

/// One stored cell `(row, col, value)` of a symmetric matrix, in support-local
/// positions with `row <= col`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCell {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// `h_A(x − shift)` for a sparse symmetric `A` with `‖A‖_F = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicQuadratic {
    /// Sorted coordinates touched by `A`.
    pub support: Vec<usize>,
    /// Upper-triangle cells of the normalized `A`, indexed into `support`.
    pub cells: Vec<LocalCell>,
    /// Offset on `support`.
    pub shift: Vec<f64>,
    /// Frobenius norm of the matrix before normalization.
    pub norm: f64,
}

impl HarmonicQuadratic {
    /// Builds the probe from global upper-triangle cells `(i, j, value)`,
    /// `i <= j`, dividing by the Frobenius norm. `shift` is the full-length
    /// offset; only its entries on the support are kept.
    pub fn from_cells(cells: &[(usize, usize, f64)], shift: &[f64]) -> Result<Self> {
        let mut support: Vec<usize> = cells.iter().flat_map(|&(i, j, _)| [i, j]).collect();
        support.sort_unstable();
        support.dedup();
        if support.last().is_some_and(|&i| i >= shift.len()) {
            return param("quadratic probe cell lies outside the shift vector");
        }
        let mut frob2 = 0.0;
        for &(i, j, v) in cells {
            if i > j {
                return param("quadratic probe cells must satisfy i <= j");
            }
            frob2 += if i == j { v * v } else { 2.0 * v * v };
        }
        let norm = frob2.sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return param("quadratic probe needs a nonzero finite matrix");
        }
        let pos = |g: usize| support.binary_search(&g).expect("support covers cells");
        let local = cells
            .iter()
            .map(|&(i, j, v)| LocalCell {
                row: pos(i),
                col: pos(j),
                value: v / norm,
            })
            .collect();
        let shift = support.iter().map(|&i| shift[i]).collect();
        Ok(Self {
            support,
            cells: local,
            shift,
            norm,
        })
    }

    /// Frobenius norm of the stored (normalized) matrix.
    pub fn frobenius(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let w = if c.row == c.col { 1.0 } else { 2.0 };
                w * c.value * c.value
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Dense `|support| × |support|` row-major copy of the normalized `A`.
    pub fn dense_local(&self) -> Vec<f64> {
        let m = self.support.len();
        let mut a = vec![0.0; m * m];
        for c in &self.cells {
            a[c.row * m + c.col] = c.value;
            a[c.col * m + c.row] = c.value;
        }
        a
    }

    /// `h_A` of the support-local offset vector `y`.
    pub fn eval_local(&self, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for c in &self.cells {
            if c.row == c.col {
                acc += c.value * (y[c.row] * y[c.row] - 1.0);
            } else {
                acc += 2.0 * c.value * y[c.row] * y[c.col];
            }
        }
        acc / SQRT_2
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = self
            .support
            .iter()
            .zip(&self.shift)
            .map(|(&i, s)| x[i] - s)
            .collect();
        self.eval_local(&y)
    }

    /// `Hom_A(m) = mᵀAm` for a support-local vector.
    fn hom(&self, m: &[f64]) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let w = if c.row == c.col { 1.0 } else { 2.0 };
                w * c.value * m[c.row] * m[c.col]
            })
            .sum()
    }

    /// `‖A m‖²`, i.e. `Hom_{AAᵀ}(m)`.
    fn hom_aat(&self, m: &[f64]) -> f64 {
        let mut am = vec![0.0; m.len()];
        for c in &self.cells {
            am[c.row] += c.value * m[c.col];
            if c.row != c.col {
                am[c.col] += c.value * m[c.row];
            }
        }
        am.iter().map(|v| v * v).sum()
    }
}

/// A filtering probe with its degree.
#[derive(Debug, Clone, PartialEq)]
pub enum PolyProbe {
    Linear(SparseLinear),
    Quadratic(HarmonicQuadratic),
}

impl PolyProbe {
    pub fn degree(&self) -> u32 {
        match self {
            PolyProbe::Linear(_) => 1,
            PolyProbe::Quadratic(_) => 2,
        }
    }

    pub fn support(&self) -> &[usize] {
        match self {
            PolyProbe::Linear(p) => &p.support,
            PolyProbe::Quadratic(p) => &p.support,
        }
    }

    pub fn shift(&self) -> &[f64] {
        match self {
            PolyProbe::Linear(p) => &p.shift,
            PolyProbe::Quadratic(p) => &p.shift,
        }
    }
}

/// Evaluates a probe at a full-length point.
pub fn eval_probe(p: &PolyProbe, x: &[f64]) -> f64 {
    match p {
        PolyProbe::Linear(l) => l.eval(x),
        PolyProbe::Quadratic(q) => q.eval(x),
    }
}

/// First and second moments of `p(X)` for `X ~ N(μ, I)`, with `mu` given on
/// the probe support.
///
/// For the quadratic probe, with `m = μ − shift`:
/// `E[h_A] = Hom_A(m)/√2` and
/// `E[h_A²] = ‖A‖_F² + 2·Hom_{AAᵀ}(m) + Hom_A(m)²/2`. The last term is the
/// order-4 tensor `A ⊗ A` evaluated at `m`, which factors, so it is never
/// formed.
pub fn gaussian_moments(p: &PolyProbe, mu: &[f64]) -> Result<(f64, f64)> {
    if mu.len() != p.support().len() {
        return param("mean must be given on the probe support");
    }
    let m: Vec<f64> = mu.iter().zip(p.shift()).map(|(a, s)| a - s).collect();
    Ok(match p {
        PolyProbe::Linear(l) => {
            let mean: f64 = l.coeffs.iter().zip(&m).map(|(c, v)| c * v).sum();
            let norm2: f64 = l.coeffs.iter().map(|c| c * c).sum();
            (mean, mean * mean + norm2)
        }
        PolyProbe::Quadratic(q) => {
            let hom = q.hom(&m);
            let frob2 = q.frobenius().powi(2);
            (hom / SQRT_2, frob2 + 2.0 * q.hom_aat(&m) + 0.5 * hom * hom)
        }
    })
}

fn check_support(support: &[usize]) -> Result<()> {
    if support.windows(2).any(|w| w[0] >= w[1]) {
        return param("probe support must be sorted and unique");
    }
    Ok(())
}

/// Gauss–Hermite rule for the standard normal weight `φ(x)`.
///
/// Nodes are the eigenvalues of the Jacobi matrix of the probabilists'
/// Hermite recurrence; weights come from the Christoffel function
/// `w_i = 1 / Σ_{j<n} He_j(x_i)²/j!`, which stays accurate at the tails where
/// squared eigenvector components underflow.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = (i as f64).sqrt();
        jacobi[(i, i - 1)] = b;
        jacobi[(i - 1, i)] = b;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    for x in nodes.iter_mut() {
        // Newton polish on He_n using He_n' = n·He_{n−1}, in the normalized
        // basis ψ_j = He_j/√(j!) to avoid overflow.
        for _ in 0..3 {
            let (psi_n, psi_nm1) = normalized_pair(n, *x);
            let step = psi_n / ((n as f64).sqrt() * psi_nm1);
            if step.is_finite() {
                *x -= step;
            }
        }
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (mut prev, mut cur) = (0.0, 1.0);
            let mut sum = 1.0;
            for j in 0..n - 1 {
                let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
                prev = cur;
                cur = next;
                sum += cur * cur;
            }
            1.0 / sum
        })
        .collect();
    (nodes, weights)
}

/// `(ψ_n(x), ψ_{n−1}(x))` with `ψ_j = He_j/√(j!)`.
fn normalized_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..n {
        let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn low_order_hermite_values() {
        assert_eq!(hermite_eval(0, -7.3).unwrap(), 1.0);
        assert_eq!(hermite_eval(1, 3.5).unwrap(), 3.5);
        // d²/dx² e^{−x²/2} = (x² − 1)e^{−x²/2}, so He_2(2) = 3.
        assert_eq!(hermite_eval(2, 2.0).unwrap(), 3.0);
        // He_3 = x³ − 3x, He_4 = x⁴ − 6x² + 3.
        assert!((hermite_eval(3, 1.5).unwrap() - (3.375 - 4.5)).abs() < 1e-12);
        assert!((hermite_eval(4, 2.0).unwrap() - (16.0 - 24.0 + 3.0)).abs() < 1e-12);
        assert!(hermite_eval(65, 0.0).is_err());
    }

    #[test]
    fn quadrature_integrates_moments() {
        let (x, w) = gauss_hermite(64);
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m2 - 1.0).abs() < 1e-10);
        assert!((m4 - 3.0).abs() < 1e-10);
    }

    #[test]
    fn linear_probe_projects_coordinate() {
        let p = PolyProbe::Linear(SparseLinear::coordinate(0));
        assert_eq!(eval_probe(&p, &[4.0, 7.0, 1.0]), 4.0);
    }

    #[test]
    fn quadratic_identity_block_vanishes_on_ones() {
        let s = 1.0 / SQRT_2;
        let q = HarmonicQuadratic::from_cells(&[(0, 0, s), (1, 1, s)], &[0.0; 3]).unwrap();
        assert!(eval_probe(&PolyProbe::Quadratic(q), &[1.0, 1.0, 9.0]).abs() < 1e-15);
    }

    #[test]
    fn quadratic_off_diagonal_example() {
        // xᵀAx = 2·(1/√2)·2·3 = 6√2, tr A = 0, h_A = 6√2/√2 = 6.
        let s = 1.0 / SQRT_2;
        let q = HarmonicQuadratic::from_cells(&[(0, 1, s)], &[0.0; 3]).unwrap();
        assert!((q.frobenius() - 1.0).abs() < 1e-12);
        let v = eval_probe(&PolyProbe::Quadratic(q), &[2.0, 3.0, -1.0]);
        assert!((v - 6.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn centered_moments() {
        let s = 1.0 / SQRT_2;
        let q = HarmonicQuadratic::from_cells(&[(0, 1, s)], &[0.5, -1.0]).unwrap();
        let (mean, second) =
            gaussian_moments(&PolyProbe::Quadratic(q.clone()), &q.shift).unwrap();
        assert_eq!(mean, 0.0);
        assert!((second - 1.0).abs() < 1e-12);
        let l = SparseLinear::new(vec![1], vec![1.0], vec![0.0]).unwrap();
        assert_eq!(gaussian_moments(&PolyProbe::Linear(l), &[0.0]).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn shifted_diagonal_moments_match_monte_carlo() {
        // A = e₀e₀ᵀ, μ − shift = (m, 0): h_A(X) = (X₀² − 1)/√2.
        let m = 1.3;
        let q = HarmonicQuadratic::from_cells(&[(0, 0, 1.0)], &[0.0, 0.0]).unwrap();
        let probe = PolyProbe::Quadratic(q);
        let (mean, second) = gaussian_moments(&probe, &[m]).unwrap();
        assert!((mean - m * m / SQRT_2).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 1_000_000;
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for _ in 0..draws {
            let g: f64 = rng.sample(StandardNormal);
            let v = eval_probe(&probe, &[m + g, 0.0]);
            s1 += v;
            s2 += v * v;
            s4 += v.powi(4);
        }
        let n = draws as f64;
        let (e1, e2, e4) = (s1 / n, s2 / n, s4 / n);
        let se1 = ((e2 - e1 * e1) / n).sqrt();
        let se2 = ((e4 - e2 * e2) / n).sqrt();
        assert!((e1 - mean).abs() < 3.0 * se1, "mean {e1} vs {mean} (se {se1})");
        assert!((e2 - second).abs() < 3.0 * se2, "second {e2} vs {second} (se {se2})");
    }

    #[test]
    fn harmonic_matches_hermite_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let d = 6;
            let mut cells = Vec::new();
            for i in 0..d {
                for j in i..d {
                    if rng.random_bool(0.4) {
                        cells.push((i, j, rng.random_range(-1.0..1.0)));
                    }
                }
            }
            if cells.is_empty() {
                continue;
            }
            let q = HarmonicQuadratic::from_cells(&cells, &vec![0.0; d]).unwrap();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = q.support.iter().map(|&i| x[i]).collect();
            let mut expansion = 0.0;
            for c in &q.cells {
                if c.row == c.col {
                    expansion += c.value * hermite_eval(2, y[c.row]).unwrap() / SQRT_2;
                } else {
                    expansion += 2.0 * c.value * y[c.row] * y[c.col] / SQRT_2;
                }
            }
            assert!((q.eval(&x) - expansion).abs() < 1e-9);
        }
    }
}
