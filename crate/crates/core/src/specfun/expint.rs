//! Exponential integral E₁ and the Tricomi function Ψ(1, 0; z).
//!
//! Real arguments follow the classical split: ascending series below 1,
//! Jacobi continued fraction above. The complex versions extend the same
//! kernels to the cut plane `|arg z| < π` (needed by contour Laplace
//! inversion) and switch to the asymptotic expansion for large `|z|`.

use num_complex::Complex64;

use super::EULER_GAMMA;
use crate::error::{Error, Result};

const CF_MAX_ITER: usize = 100_000;
const CF_EPS: f64 = 1e-15;
// Complex division squares the divisor, so keep the floor well above 1e-154.
const TINY: f64 = 1e-150;
const ASYMPTOTIC_RADIUS: f64 = 40.0;

/// Σ_{n≥1} (−1)^{n+1} zⁿ / (n·n!), so that E₁(z) = −Υ − ln z + series.
fn e1_series_tail(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..200 {
        let nf = n as f64;
        term *= -z / nf;
        let contrib = -term / nf;
        sum += contrib;
        if contrib.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn e1_series(z: Complex64) -> Complex64 {
    -EULER_GAMMA - z.ln() + e1_series_tail(z)
}

/// Modified Lentz evaluation of b0 + a1/(b1 + a2/(b2 + ...)) with the
/// coefficients supplied by `coef(n) -> (a_n, b_n)` for n ≥ 1.
fn lentz<F: Fn(usize) -> (Complex64, Complex64)>(b0: Complex64, coef: F) -> Option<Complex64> {
    let tiny = Complex64::new(TINY, 0.0);
    let mut f = if b0.norm() == 0.0 { tiny } else { b0 };
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..=CF_MAX_ITER {
        let (a, b) = coef(n);
        d = b + a * d;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < CF_EPS {
            return Some(f);
        }
    }
    None
}

/// T(z) = 1²/(z+3 − 2²/(z+5 − 3²/(z+7 − …))), the tail of the E₁ fraction.
fn cf_tail(z: Complex64) -> Option<Complex64> {
    lentz(Complex64::new(0.0, 0.0), |n| {
        let nf = n as f64;
        let a = if n == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-nf * nf, 0.0)
        };
        (a, z + 2.0 * nf + 1.0)
    })
}

/// e^z E₁(z) by continued fraction; `None` if the fraction fails to settle.
fn scaled_e1_cf(z: Complex64) -> Option<Complex64> {
    cf_tail(z).map(|t| (z + 1.0 - t).inv())
}

/// Ψ(1,0;z) ~ Σ_{n≥1} (−1)^{n−1} n!/zⁿ, truncated at the smallest term.
fn psi_asymptotic(z: Complex64) -> Complex64 {
    let mut term = z.inv();
    let mut sum = term;
    let mut last = term.norm();
    for n in 2..200 {
        let next = -term * (n as f64) / z;
        let mag = next.norm();
        if mag >= last {
            break;
        }
        sum += next;
        term = next;
        last = mag;
        if mag <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn check_cut_plane(op: &'static str, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(op, format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::domain(op, format!("argument {z} lies on the branch cut")));
    }
    Ok(())
}

/// E₁(x) = ∫ₓ^∞ e^(−t)/t dt for x > 0.
///
/// Underflows to 0 beyond x ≈ 740; use [`exp_scaled_e1`] there.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("exp_integral_e1", format!("requires x > 0, got {x}")));
    }
    if x < 1.0 {
        Ok(e1_series(Complex64::new(x, 0.0)).re)
    } else {
        Ok(exp_scaled_e1(x)? * (-x).exp())
    }
}

/// e^x E₁(x) for x > 0, free of overflow and underflow.
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("exp_scaled_e1", format!("requires x > 0, got {x}")));
    }
    if x < 1.0 {
        Ok(x.exp() * e1_series(Complex64::new(x, 0.0)).re)
    } else {
        scaled_e1_cf(Complex64::new(x, 0.0))
            .map(|v| v.re)
            .ok_or_else(|| Error::numerical("exp_scaled_e1", "continued fraction stalled"))
    }
}

/// Tricomi confluent hypergeometric Ψ(1, 0; z) = 1 − z e^z E₁(z), z > 0.
pub fn tricomi_psi_1_0(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain("tricomi_psi_1_0", format!("requires z > 0, got {z}")));
    }
    tricomi_psi_1_0_complex(Complex64::new(z, 0.0)).map(|v| v.re)
}

/// Principal-branch E₁(z) for `z` off the non-positive real axis.
pub fn exp_integral_e1_complex(z: Complex64) -> Result<Complex64> {
    check_cut_plane("exp_integral_e1_complex", z)?;
    if z.norm() < 1.0 {
        return Ok(e1_series(z));
    }
    if z.norm() > ASYMPTOTIC_RADIUS {
        // e^z E₁(z) = (1 − Ψ(1,0;z))/z
        return Ok((1.0 - psi_asymptotic(z)) / z * (-z).exp());
    }
    scaled_e1_cf(z)
        .map(|v| v * (-z).exp())
        .ok_or_else(|| Error::numerical("exp_integral_e1_complex", "continued fraction stalled"))
}

/// Principal-branch Ψ(1, 0; z) for `z` off the non-positive real axis.
///
/// For large arguments Ψ is formed as (1 − T)/(z + 1 − T) from the fraction
/// tail T, which avoids the cancellation in 1 − z e^z E₁(z).
pub fn tricomi_psi_1_0_complex(z: Complex64) -> Result<Complex64> {
    check_cut_plane("tricomi_psi_1_0_complex", z)?;
    let r = z.norm();
    if r < 1.0 {
        return Ok(1.0 - z * z.exp() * e1_series(z));
    }
    if r > ASYMPTOTIC_RADIUS {
        return Ok(psi_asymptotic(z));
    }
    let t = cf_tail(z)
        .ok_or_else(|| Error::numerical("tricomi_psi_1_0_complex", "continued fraction stalled"))?;
    Ok((1.0 - t) / (z + 1.0 - t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_to_infinity, QuadOptions};

    fn e1_by_quadrature(x: f64) -> f64 {
        integrate_to_infinity(|t| (-t).exp() / t, x, QuadOptions::with_tol(1e-16, 1e-14))
            .unwrap()
            .value
    }

    #[test]
    fn e1_at_one_matches_quadrature() {
        let oracle = e1_by_quadrature(1.0);
        assert!((oracle - 0.219_383_934_395_52).abs() < 1e-13);
        let v = exp_integral_e1(1.0).unwrap();
        assert!((v - oracle).abs() / oracle < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn e1_relative_accuracy_across_branches() {
        // mpmath reference values (30 digits).
        let refs = [
            (1e-3, 6.331_539_364_136_149),
            (0.5, 0.559_773_594_776_160_8),
            (5.0, 1.148_295_591_275_325_8e-3),
            (20.0, 9.835_525_290_649_882e-11),
        ];
        for (x, want) in refs {
            let got = exp_integral_e1(x).unwrap();
            assert!((got - want).abs() / want < 1e-12, "E1({x}) = {got}, want {want}");
        }
        for x in [0.05, 0.3, 0.99, 1.0, 1.01, 3.0, 12.0] {
            let oracle = e1_by_quadrature(x);
            let got = exp_integral_e1(x).unwrap();
            assert!((got - oracle).abs() / oracle < 1e-11, "x={x}: {got} vs {oracle}");
        }
    }

    #[test]
    fn e1_small_argument_tracks_log() {
        let mut last = f64::INFINITY;
        for k in 3..12 {
            let x = 10f64.powi(-k);
            let rel = (exp_integral_e1(x).unwrap() - (-EULER_GAMMA - x.ln())).abs()
                / exp_integral_e1(x).unwrap();
            assert!(rel < last);
            last = rel;
        }
        assert!(last < 1e-11);
    }

    #[test]
    fn e1_large_argument_bracket() {
        let x: f64 = 50.0;
        let v = exp_integral_e1(x).unwrap();
        assert!(v > (-x).exp() / (x + 1.0) && v < (-x).exp() / x);
    }

    #[test]
    fn e1_rejects_nonpositive() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(tricomi_psi_1_0(0.0).is_err());
        assert!(exp_integral_e1(f64::NAN).is_err());
    }

    #[test]
    fn e1_derivative_matches_finite_difference() {
        for x in [0.5, 1.0, 2.0, 5.0] {
            let h = 1e-5 * x;
            let fd = (exp_integral_e1(x + h).unwrap() - exp_integral_e1(x - h).unwrap()) / (2.0 * h);
            let exact = -(-x).exp() / x;
            assert!(((fd - exact) / exact).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn psi_known_values() {
        let e = std::f64::consts::E;
        let want1 = 1.0 - e * 0.219_383_934_395_520_27;
        assert!((tricomi_psi_1_0(1.0).unwrap() - want1).abs() < 1e-13);
        assert!((want1 - 0.403_652_637_676_80).abs() < 1e-13);
        assert!((tricomi_psi_1_0(1e-12).unwrap() - 1.0).abs() < 1e-10);
    }

    fn psi_defining_integral(z: f64) -> f64 {
        // Ψ(1,0;z) = ∫₀^∞ e^(−z t) (1+t)^(−2) dt
        integrate_to_infinity(
            |t| (-z * t).exp() / ((1.0 + t) * (1.0 + t)),
            0.0,
            QuadOptions::with_tol(1e-15, 1e-13),
        )
        .unwrap()
        .value
    }

    #[test]
    fn psi_matches_defining_integral_on_log_grid() {
        for i in 0..=40 {
            let z = 10f64.powf(-3.0 + 4.0 * i as f64 / 40.0);
            let got = tricomi_psi_1_0(z).unwrap();
            let oracle = psi_defining_integral(z);
            assert!((got - oracle).abs() <= 1e-8, "z={z}: {got} vs {oracle}");
            assert!(got > 0.0 && got < 1.0);
        }
    }

    #[test]
    fn psi_scaled_form_of_the_hop_mgf() {
        // (1/a)∫₀^∞ e^(−s x)(x + 1/a)^(−2) dx at s/a = 0.5
        let a = 4.0;
        let s = 2.0;
        let direct = integrate(
            |x| (-s * x).exp() / ((x + 1.0 / a) * (x + 1.0 / a)),
            0.0,
            60.0,
            QuadOptions::with_tol(1e-15, 1e-13),
        )
        .unwrap()
        .value
            / a;
        assert!((tricomi_psi_1_0(0.5).unwrap() - direct).abs() < 1e-8);
    }

    #[test]
    fn psi_large_argument_is_smooth_across_branches() {
        // Decreasing and ~1/z − 2/z² for large z.
        let mut prev = 1.0;
        for i in 0..200 {
            let z = 0.01 * 1.08f64.powi(i);
            let v = tricomi_psi_1_0(z).unwrap();
            assert!(v < prev, "not decreasing at z={z}");
            prev = v;
        }
        let z: f64 = 1e4;
        let v = tricomi_psi_1_0(z).unwrap();
        assert!((v - (1.0 / z - 2.0 / (z * z) + 6.0 / z.powi(3))).abs() < 30.0 / z.powi(4));
    }

    #[test]
    fn complex_psi_matches_reference_values() {
        // mpmath hyperu(1, 0, z), 30 digits.
        let refs = [
            ((-3.0, 2.0), (-0.136_170_977_850_551_58, -0.328_438_923_717_988_8)),
            ((-20.0, 5.0), (-0.051_803_255_204_417_26, -0.014_593_315_970_441_975)),
            ((2.0, -7.0), (0.058_277_581_467_561_49, 0.107_989_937_512_543_05)),
            ((-0.5, 0.1), (0.770_588_822_957_223_6, -0.852_184_570_431_781_7)),
            ((-60.0, 30.0), (-0.013_603_155_349_066_025, -0.007_042_982_974_892_187)),
            ((10.0, 40.0), (0.006_859_330_138_780_056, -0.022_919_372_979_233_91)),
            ((-8.0, 0.5), (-0.176_847_941_003_826_26, -0.024_620_773_196_945_294)),
        ];
        for ((re, im), (wre, wim)) in refs {
            let got = tricomi_psi_1_0_complex(Complex64::new(re, im)).unwrap();
            let want = Complex64::new(wre, wim);
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "z=({re},{im}): {got} vs {want}");
        }
    }

    #[test]
    fn complex_e1_is_conjugate_symmetric_and_real_on_axis() {
        for (re, im) in [(-2.0, 0.3), (4.0, 9.0), (-35.0, 10.0), (0.2, -0.4), (70.0, 1.0)] {
            let z = Complex64::new(re, im);
            let a = exp_integral_e1_complex(z).unwrap();
            let b = exp_integral_e1_complex(z.conj()).unwrap();
            assert!((a - b.conj()).norm() <= 1e-13 * a.norm());
        }
        let on_axis = exp_integral_e1_complex(Complex64::new(2.5, 0.0)).unwrap();
        assert!((on_axis.re - exp_integral_e1(2.5).unwrap()).abs() < 1e-15);
        assert!(exp_integral_e1_complex(Complex64::new(-1.0, 0.0)).is_err());
    }
}
