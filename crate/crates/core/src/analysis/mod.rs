//! Distributions of the per-hop and end-to-end SNR, their bounds and
//! limits, and the rate and gain expressions built on them.
//!
//! Finite-K formulas take the exact per-hop shape parameters a_k. The
//! limiting, gain and rate formulas take a single shape `a`, which callers
//! obtain from [`shape_param`] under either [`ShapeConvention`].

mod evt;
mod rate;

pub use evt::{
    gains, gnedenko_aux, limiting_cdf, limiting_pdf, min_cdf_sup_distance, normalizer, GainExpansion,
    LimitNormalization,
};
pub use rate::{rate_approx, rate_bound, rate_k2, RateApprox};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::laplace::{FixedTalbot, LaplaceInverter};
use crate::specfun::{
    bessel_j1, bessel_j1_zero, hyp2f1_113_split, laplace_invert_cdf_with, tricomi_psi_1_0,
    tricomi_psi_1_0_complex,
};
pub use crate::waterfill::ShapeConvention;

/// Which bound on γ_e2e a distribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// min_k γ_k.
    Upper,
    /// min_k γ_k / K.
    Lower,
}

/// Shape parameter γ̄λη/σ² (+1 under [`ShapeConvention::Exact`]).
pub fn shape_param(lambda: f64, eta: f64, sigma2: f64, avg_snr: f64, conv: ShapeConvention) -> f64 {
    let a0 = avg_snr * lambda * eta / sigma2;
    match conv {
        ShapeConvention::Exact => a0 + 1.0,
        ShapeConvention::Printed => a0,
    }
}

fn check_shapes(op: &'static str, a: &[f64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::domain(op, "need at least one hop"));
    }
    if let Some(bad) = a.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::domain(op, format!("shape parameters must be positive, got {bad}")));
    }
    Ok(())
}

/// Per-hop SNR CDF 1 − a/(γ + a).
pub fn hop_cdf(gamma: f64, a: f64) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    gamma / (gamma + a)
}

/// Per-hop SNR density a/(γ + a)².
pub fn hop_pdf(gamma: f64, a: f64) -> f64 {
    if gamma < 0.0 {
        return 0.0;
    }
    a / ((gamma + a) * (gamma + a))
}

/// E[e^(−s/γ_k)] = Ψ(1, 0; s/a).
pub fn mgf_inv_hop(s: f64, a: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    tricomi_psi_1_0(s / a)
}

/// End-to-end SNR CDF by inverting the transform of 1/γ_e2e = Σ 1/γ_k.
pub fn e2e_cdf(gamma: f64, a: &[f64]) -> Result<f64> {
    e2e_cdf_with(&FixedTalbot::default(), gamma, a)
}

pub fn e2e_cdf_with(inverter: &dyn LaplaceInverter, gamma: f64, a: &[f64]) -> Result<f64> {
    check_shapes("e2e_cdf", a)?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain("e2e_cdf", format!("gamma must be nonnegative, got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    let mgf = |s: Complex64| -> Result<Complex64> {
        let mut prod = Complex64::new(1.0, 0.0);
        for &ak in a {
            prod *= tricomi_psi_1_0_complex(s / ak)?;
        }
        Ok(prod)
    };
    let tail = laplace_invert_cdf_with(inverter, &mgf, 1.0 / gamma)?;
    Ok((1.0 - tail).clamp(0.0, 1.0))
}

/// Closed-form two-hop CDF 1 − ½(1+γ/a₁)⁻¹(1+γ/a₂)⁻¹·₂F₁(1,1;3;x(γ)).
pub fn e2e_cdf_k2(gamma: f64, a1: f64, a2: f64) -> Result<f64> {
    check_shapes("e2e_cdf_k2", &[a1, a2])?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain("e2e_cdf_k2", format!("gamma must be nonnegative, got {gamma}")));
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    Ok(1.0 - 0.5 * k2_survival_kernel(gamma, a1, a2))
}

/// (1+γ/a₁)⁻¹(1+γ/a₂)⁻¹·₂F₁(1,1;3;x(γ)), i.e. twice the survival function.
pub(crate) fn k2_survival_kernel(gamma: f64, a1: f64, a2: f64) -> f64 {
    let den = (1.0 + gamma / a1) * (1.0 + gamma / a2);
    let x = (1.0 + (1.0 / a1 + 1.0 / a2) * gamma) / den;
    let one_minus_x = gamma * gamma / (a1 * a2) / den;
    hyp2f1_113_split(x.min(1.0), one_minus_x) / den
}

const MGF_MAX_LOBES: usize = 200;

/// E[e^(−sγ_e2e)] = 1 − 2√s ∫₀^∞ J₁(2x√s) ∏ₖ Ψ(1,0; x²/aₖ) dx, integrated
/// lobe by lobe between the zeros of J₁ with Wynn-ε acceleration of the
/// partial sums.
pub fn e2e_mgf(s: f64, a: &[f64]) -> Result<f64> {
    check_shapes("e2e_mgf", a)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::domain("e2e_mgf", format!("s must be nonnegative and finite, got {s}")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let root = s.sqrt();
    let integrand = |x: f64| -> f64 {
        let mut prod = bessel_j1(2.0 * x * root);
        for &ak in a {
            let z = x * x / ak;
            prod *= if z == 0.0 { 1.0 } else { tricomi_psi_1_0(z).unwrap_or(f64::NAN) };
        }
        prod
    };
    let opts = QuadOptions::with_tol(1e-16, 1e-12);
    let mut partial = Vec::with_capacity(MGF_MAX_LOBES);
    let mut sum = 0.0;
    let mut left = 0.0;
    let mut prev = f64::NAN;
    for m in 1..=MGF_MAX_LOBES {
        let right = bessel_j1_zero(m) / (2.0 * root);
        sum += integrate(integrand, left, right, opts)?.value;
        partial.push(sum);
        left = right;
        let est = wynn_epsilon(&partial);
        if m >= 4 && (est - prev).abs() <= 1e-14 * est.abs().max(1e-300) + 1e-16 {
            return finish_mgf(1.0 - 2.0 * root * est);
        }
        prev = est;
    }
    let est = wynn_epsilon(&partial);
    if (est - prev).abs() <= 1e-9 {
        return finish_mgf(1.0 - 2.0 * root * est);
    }
    Err(Error::numerical(
        "e2e_mgf",
        format!("oscillatory tail did not converge in {MGF_MAX_LOBES} lobes"),
    ))
}

fn finish_mgf(v: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&v) {
        return Err(Error::numerical("e2e_mgf", format!("MGF value {v} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Wynn's ε-algorithm; returns the entry of the last even column built
/// from the tail of `s`.
fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur = s.to_vec();
    let mut best = s[n - 1];
    for k in 1..n {
        let len = n - k;
        let mut next = Vec::with_capacity(len);
        for i in 0..len {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                return best;
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        if k % 2 == 0 {
            let v = next[len - 1];
            if v.is_finite() {
                best = v;
            }
        }
        prev = cur;
        cur = next;
    }
    best
}

/// CDF of the upper (min_k γ_k) or lower (min_k γ_k / K) bound.
pub fn bound_cdf(gamma: f64, a: &[f64], which: Bound) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    let g = match which {
        Bound::Upper => gamma,
        Bound::Lower => a.len() as f64 * gamma,
    };
    let log_surv: f64 = a.iter().map(|&ak| -(g / ak).ln_1p()).sum();
    -log_surv.exp_m1()
}

/// Density of the bound in `which`.
pub fn bound_pdf(gamma: f64, a: &[f64], which: Bound) -> f64 {
    if gamma < 0.0 {
        return 0.0;
    }
    let scale = match which {
        Bound::Upper => 1.0,
        Bound::Lower => a.len() as f64,
    };
    let g = scale * gamma;
    let surv: f64 = a.iter().map(|&ak| ak / (g + ak)).product();
    let hazard: f64 = a.iter().map(|&ak| 1.0 / (g + ak)).sum();
    scale * surv * hazard
}

/// Outage bracket at γ_th. `lower` is the upper-bound CDF and `upper` the
/// lower-bound CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn outage_bounds(gamma_th: f64, a: &[f64]) -> OutageBounds {
    OutageBounds {
        lower: bound_cdf(gamma_th, a, Bound::Upper),
        upper: bound_cdf(gamma_th, a, Bound::Lower),
    }
}
