//! Bessel functions J₀ and J₁ of real argument, plus the positive zeros of J₁.
//!
//! Ascending series for x ≤ 8, Miller's backward recurrence (normalised by
//! J₀ + 2ΣJ₂ₖ = 1) for 8 < x ≤ 40, Hankel's asymptotic expansion beyond.

use std::f64::consts::{FRAC_PI_4, PI};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 40.0;

fn series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 0.5 * x;
    let mut j0 = t0;
    let mut j1 = t1;
    for k in 1..60 {
        let kf = k as f64;
        t0 *= -q / (kf * kf);
        t1 *= -q / (kf * (kf + 1.0));
        j0 += t0;
        j1 += t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    (j0, j1)
}

fn miller(x: f64) -> (f64, f64) {
    let start = x as usize + 24 + (12.0 * x.cbrt()) as usize;
    let n_top = start + start % 2;
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1e-300; // J_n
    let mut norm = 0.0;
    let mut j0 = 0.0;
    let mut j1 = 0.0;
    let mut n = n_top;
    while n > 0 {
        let prev = 2.0 * n as f64 / x * cur - next; // J_{n-1}
        next = cur;
        cur = prev;
        n -= 1;
        if n.is_multiple_of(2) && n > 0 {
            norm += 2.0 * cur;
        }
        if n == 1 {
            j1 = cur;
        }
        if n == 0 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            j1 *= s;
        }
    }
    norm += j0;
    (j0 / norm, j1 / norm)
}

fn hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..120 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let mag = a.abs();
        if mag >= last || mag < 1e-18 {
            break;
        }
        last = mag;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    let omega = x - (nu as f64 * 0.5) * PI - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

fn j0_j1_nonneg(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        series(x)
    } else if x <= ASYMPTOTIC_LIMIT {
        miller(x)
    } else {
        (hankel(0, x), hankel(1, x))
    }
}

/// J₀(x).
pub fn bessel_j0(x: f64) -> f64 {
    j0_j1_nonneg(x.abs()).0
}

/// J₁(x); odd in x.
pub fn bessel_j1(x: f64) -> f64 {
    let v = j0_j1_nonneg(x.abs()).1;
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// The m-th positive zero of J₁ (m ≥ 1), McMahon's estimate polished by Newton.
pub fn bessel_j1_zero(m: usize) -> f64 {
    assert!(m >= 1, "zeros are indexed from 1");
    let beta = (m as f64 + 0.25) * PI;
    let mut x = beta - 3.0 / (8.0 * beta) + 36.0 / (1536.0 * beta.powi(3));
    for _ in 0..8 {
        let (j0, j1) = j0_j1_nonneg(x);
        let step = j1 / (j0 - j1 / x);
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath besselj, 30 digits.
    const J1_REFS: [(f64, f64); 6] = [
        (1.0, 0.440_050_585_744_933_5),
        (10.0, 0.043_472_746_168_861_44),
        (23.7, -0.132_327_666_311_553_76),
        (50.0, -0.097_511_828_125_175_14),
        (100.0, -0.077_145_352_014_112_16),
        (500.0, 0.010_472_613_470_372_293),
    ];
    const J0_REFS: [(f64, f64); 4] = [
        (1.0, 0.765_197_686_557_966_6),
        (10.0, -0.245_935_764_451_348_34),
        (23.7, -0.099_516_546_057_872_75),
        (500.0, -0.034_100_556_880_732),
    ];

    fn ascending_series_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut fact_k = 1.0;
        for k in 0..30u32 {
            if k > 0 {
                fact_k *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (x / 2.0).powi(2 * k as i32 + 1) / (fact_k * fact_k * (k + 1) as f64);
        }
        sum
    }

    #[test]
    fn j1_reference_values() {
        assert_eq!(bessel_j1(0.0), 0.0);
        assert!((bessel_j1(1.0) - ascending_series_oracle(1.0)).abs() < 1e-15);
        assert!((ascending_series_oracle(1.0) - 0.440_050_585_744_93).abs() < 1e-13);
        for (x, want) in J1_REFS {
            assert!((bessel_j1(x) - want).abs() < 1e-12, "J1({x}) = {}", bessel_j1(x));
        }
        for (x, want) in J0_REFS {
            assert!((bessel_j0(x) - want).abs() < 1e-12, "J0({x}) = {}", bessel_j0(x));
        }
    }

    #[test]
    fn branches_are_continuous() {
        let (s0, s1) = series(SERIES_LIMIT);
        let (m0, m1) = miller(SERIES_LIMIT);
        assert!((s0 - m0).abs() < 1e-13 && (s1 - m1).abs() < 1e-13);
        let (m0, m1) = miller(ASYMPTOTIC_LIMIT);
        assert!((m0 - hankel(0, ASYMPTOTIC_LIMIT)).abs() < 1e-13);
        assert!((m1 - hankel(1, ASYMPTOTIC_LIMIT)).abs() < 1e-13);
    }

    #[test]
    fn wronskian_like_identity() {
        // J₁' = J₀ − J₁/x; compare with a central difference.
        for x in [0.7, 5.0, 9.3, 31.0, 77.0, 420.0] {
            let h = 1e-6;
            let fd = (bessel_j1(x + h) - bessel_j1(x - h)) / (2.0 * h);
            let exact = bessel_j0(x) - bessel_j1(x) / x;
            assert!((fd - exact).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn first_zero() {
        let z = bessel_j1_zero(1);
        assert!((z - 3.831_705_970_207_512).abs() < 1e-12);
        assert!(bessel_j1(3.831_705_970_2).abs() < 1e-9);
        // Zeros interlace at roughly π spacing.
        for m in 1..50 {
            let gap = bessel_j1_zero(m + 1) - bessel_j1_zero(m);
            assert!((gap - PI).abs() < 0.1);
            assert!(bessel_j1(bessel_j1_zero(m)).abs() < 1e-12);
        }
    }
}
