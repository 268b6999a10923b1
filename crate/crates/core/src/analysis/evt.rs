//! Limiting laws of the SNR bounds and the high-SNR gain expansion.

use super::{bound_cdf, Bound};
use crate::error::{Error, Result};

/// Location and scale that normalize a bound's minimum to the
/// exponential limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitNormalization {
    pub c_k: f64,
    pub d_k: f64,
}

/// Limiting CDF 1 − e^(−u) of the normalized bounds.
pub fn limiting_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    -(-u).exp_m1()
}

pub fn limiting_pdf(u: f64) -> f64 {
    if u < 0.0 {
        return 0.0;
    }
    (-u).exp()
}

/// c_K = 0 and d_K = a/(K−1) (upper) or a/(K(K−1)) (lower).
pub fn normalizer(k: usize, a: f64, which: Bound) -> Result<LimitNormalization> {
    if k < 2 {
        return Err(Error::domain("normalizer", format!("needs K >= 2, got {k}")));
    }
    if !(a > 0.0) {
        return Err(Error::domain("normalizer", format!("shape must be positive, got {a}")));
    }
    let km1 = (k - 1) as f64;
    let d_k = match which {
        Bound::Upper => a / km1,
        Bound::Lower => a / (k as f64 * km1),
    };
    Ok(LimitNormalization { c_k: 0.0, d_k })
}

/// Auxiliary G(x) = F_γk(−1/x) = 1/(1 − a·x) of the Gnedenko condition.
pub fn gnedenko_aux(x: f64, a: f64) -> f64 {
    1.0 / (1.0 - a * x)
}

/// sup over u ∈ [0, u_max] of |F_min(d_K·u) − (1 − e^(−u))| for K i.i.d.
/// hops of shape `a`, on a uniform grid of `points` nodes.
pub fn min_cdf_sup_distance(k: usize, a: f64, u_max: f64, points: usize) -> Result<f64> {
    let norm = normalizer(k, a, Bound::Upper)?;
    let shapes = vec![a; k];
    let n = points.max(2);
    Ok((0..n)
        .map(|i| {
            let u = u_max * i as f64 / (n - 1) as f64;
            (bound_cdf(norm.d_k * u, &shapes, Bound::Upper) - limiting_cdf(u)).abs()
        })
        .fold(0.0, f64::max))
}

/// Small-SNR density expansion b·γ^t and the gains derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainExpansion {
    pub t: f64,
    pub b: f64,
    pub diversity_gain: f64,
    pub coding_gain: f64,
}

/// Gains of the limiting upper-bound law with shape `a` and constellation
/// constant `p`: t = 0, b = (K−1)/a, G_d = 1, G_c = 2p·a/(K−1).
pub fn gains(k: usize, a: f64, p: f64) -> Result<GainExpansion> {
    if k < 2 {
        return Err(Error::domain("gains", format!("needs K >= 2, got {k}")));
    }
    if !(a > 0.0) || !(p > 0.0) {
        return Err(Error::domain("gains", "shape and constellation constant must be positive"));
    }
    let km1 = (k - 1) as f64;
    let t = 0.0;
    let b = km1 / a;
    Ok(GainExpansion {
        t,
        b,
        diversity_gain: t + 1.0,
        coding_gain: 2.0 * p * a / km1,
    })
}
