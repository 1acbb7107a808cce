//! Estimation parameters and the thresholds derived from them.

use crate::error::{param, Error, Result};

/// Parameters of one list-decoding run.
///
/// `gamma = ln((d·k/alpha)·ln(1/tau))` is computed once at construction; every
/// threshold in the crate reads it from here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationParams {
    alpha: f64,
    tau: f64,
    k: usize,
    d: usize,
    big_c: f64,
    gamma: f64,
}

impl EstimationParams {
    pub fn new(alpha: f64, tau: f64, k: usize, d: usize, big_c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return param(format!("alpha must lie in (0, 1/2], got {alpha}"));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return param(format!("tau must lie in (0, 1), got {tau}"));
        }
        if k == 0 || k > d {
            return param(format!("need 1 <= k <= d, got k={k}, d={d}"));
        }
        if !(big_c > 0.0 && big_c.is_finite()) {
            return param(format!("C must be positive, got {big_c}"));
        }
        Ok(Self {
            alpha,
            tau,
            k,
            d,
            big_c,
            gamma: gamma(alpha, tau, k, d),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn big_c(&self) -> f64 {
        self.big_c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Parameters for a filter call on a work item with purity `alpha` and
    /// confidence `tau`. Only `gamma` changes besides the two inputs.
    pub fn for_item(&self, alpha: f64, tau: f64) -> FilterParams {
        FilterParams {
            alpha,
            tau,
            k: self.k,
            d: self.d,
            big_c: self.big_c,
            gamma: gamma(alpha, tau, self.k, self.d),
        }
    }
}

fn gamma(alpha: f64, tau: f64, k: usize, d: usize) -> f64 {
    ((d as f64 * k as f64 / alpha) * (1.0 / tau).ln()).ln()
}

/// Per-call parameters of the filters. Unlike [`EstimationParams`] the purity
/// may exceed 1/2 (children of a split carry larger `alpha`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub alpha: f64,
    pub tau: f64,
    pub k: usize,
    pub d: usize,
    pub big_c: f64,
    pub gamma: f64,
}

impl FilterParams {
    /// `ln(1/alpha)`.
    pub fn log_inv_alpha(&self) -> f64 {
        (1.0 / self.alpha).ln()
    }

    /// `C·ln(1/α)·ln²(2 + ln(1/α))`: the Frobenius/eigenvalue threshold of the
    /// main multifilter and the quadratic normalizer `beta`.
    pub fn spectral_threshold(&self) -> f64 {
        let l = self.log_inv_alpha();
        self.big_c * l * (2.0 + l).ln().powi(2)
    }

    /// Sparsity budget of a filtering probe.
    pub fn sparsity(&self) -> f64 {
        (self.k * self.k) as f64
    }
}

/// `⌈scale · α⁻⁷ · k¹² · ln(d/τ) · γ⁴⌉`, the sample count the guarantees ask
/// for with the hidden constant replaced by `scale`.
pub fn required_sample_size(params: &EstimationParams, scale: f64) -> Result<u64> {
    if !(scale > 0.0 && scale.is_finite()) {
        return param(format!("scale must be positive, got {scale}"));
    }
    let value = scale
        * params.alpha.powi(-7)
        * (params.k as f64).powi(12)
        * (params.d as f64 / params.tau).ln()
        * params.gamma.powi(4);
    let ceil = value.ceil();
    // 2^64 is exactly representable; anything at or above it overflows.
    if !ceil.is_finite() || ceil >= 18_446_744_073_709_551_616.0 {
        return Err(Error::SampleSizeOverflow { value });
    }
    Ok(ceil as u64)
}
