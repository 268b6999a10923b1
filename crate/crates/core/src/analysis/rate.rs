//! Achievable-rate expressions.

use std::f64::consts::LN_2;

use super::k2_survival_kernel;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::specfun::{exp_scaled_e1, EULER_GAMMA};

fn rate_argument(op: &'static str, k: usize, a: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain(op, format!("needs K >= 2, got {k}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(op, format!("shape must be positive, got {a}")));
    }
    Ok((k - 1) as f64 / a)
}

/// (1/(K ln 2))·e^x·E₁(x) with x = (K−1)/a.
pub fn rate_bound(k: usize, a: f64) -> Result<f64> {
    let x = rate_argument("rate_bound", k, a)?;
    Ok(exp_scaled_e1(x)? / (k as f64 * LN_2))
}

/// Small-x approximation of [`rate_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateApprox {
    pub value: f64,
    pub x: f64,
    /// x < 0.01, where the approximation is within a few percent.
    pub valid: bool,
}

/// (1/(K ln 2))·(−Υ − ln x).
pub fn rate_approx(k: usize, a: f64) -> Result<RateApprox> {
    let x = rate_argument("rate_approx", k, a)?;
    Ok(RateApprox {
        value: (-EULER_GAMMA - x.ln()) / (k as f64 * LN_2),
        x,
        valid: x < 0.01,
    })
}

/// Two-hop rate (1/(4 ln 2))∫₀^∞ (1+γ)⁻¹(1+γ/a₁)⁻¹(1+γ/a₂)⁻¹·₂F₁(1,1;3;x(γ)) dγ.
pub fn rate_k2(a1: f64, a2: f64) -> Result<f64> {
    for a in [a1, a2] {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain("rate_k2", format!("shape must be positive, got {a}")));
        }
    }
    let f = |g: f64| k2_survival_kernel(g, a1, a2) / (1.0 + g);
    let opts = QuadOptions::with_tol(1e-15, 1e-10);
    let (lo, hi) = (a1.min(a2), a1.max(a2));
    let mut knots = vec![0.0, 1.0];
    for b in [lo, hi] {
        if b > *knots.last().unwrap() {
            knots.push(b);
        }
    }
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += integrate(f, w[0], w[1], opts)?.value;
    }
    total += integrate_to_infinity(f, *knots.last().unwrap(), opts)?.value;
    Ok(total / (4.0 * LN_2))
}
