//! Per-hop water-filling under an average interference-power cap.

use crate::error::{Error, Result};
use crate::model::{SystemConfig, Topology};
use crate::registry::{Named, Registry};

pub const DEFAULT_WATER_RULE: &str = "printed";

/// Derived per-hop constants shared by the simulator and the analytics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopLaw {
    pub water_level: f64,
    /// a = γ̄λη/σ² + 1.
    pub shape_exact: f64,
    /// a₀ = γ̄λη/σ².
    pub shape_approx: f64,
    /// Probability that the hop stays silent, 1/a.
    pub zero_prob: f64,
}

impl HopLaw {
    pub fn new(water_level: f64, eta: f64, sigma2: f64, avg_snr: f64) -> Self {
        let a0 = avg_snr * water_level * eta / sigma2;
        let a = a0 + 1.0;
        Self {
            water_level,
            shape_exact: a,
            shape_approx: a0,
            zero_prob: 1.0 / a,
        }
    }

    pub fn shape(&self, conv: ShapeConvention) -> f64 {
        match conv {
            ShapeConvention::Exact => self.shape_exact,
            ShapeConvention::Printed => self.shape_approx,
        }
    }
}

/// Which shape parameter the limiting, gain and rate formulas use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShapeConvention {
    /// a = γ̄λη/σ² + 1.
    #[default]
    Exact,
    /// a ≈ γ̄λη/σ².
    Printed,
}

/// Left-hand side of the water-level equation as a function of λ.
pub trait WaterLevelRule: Named + Send + Sync {
    fn lhs(&self, lambda: f64, eta: f64, sigma2: f64, avg_snr: f64) -> f64;
    fn lhs_derivative(&self, lambda: f64, eta: f64, sigma2: f64, avg_snr: f64) -> f64;
}

/// v − ln(1 + v) without cancellation for small v.
fn x_minus_ln1p(v: f64) -> f64 {
    if v < 0.1 {
        let mut term = -v;
        let mut sum = 0.0;
        for n in 2..40 {
            term *= -v;
            let t = term / n as f64;
            sum += t;
            if t.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        v - v.ln_1p()
    }
}

/// The closed form λ(ηλ+σ²)/(ηλ+γ̄σ²) − (σ²/η)·ln(1 + ηλ/(γ̄σ²)).
#[derive(Debug, Default)]
pub struct PrintedRule;

impl Named for PrintedRule {
    fn name(&self) -> &str {
        "printed"
    }
}

impl WaterLevelRule for PrintedRule {
    fn lhs(&self, lambda: f64, eta: f64, sigma2: f64, avg_snr: f64) -> f64 {
        let u = eta * lambda / (avg_snr * sigma2);
        (sigma2 / eta) * (u * u * (avg_snr - 1.0) / (u + 1.0) + x_minus_ln1p(u))
    }

    fn lhs_derivative(&self, lambda: f64, eta: f64, sigma2: f64, avg_snr: f64) -> f64 {
        let a = eta * lambda;
        let gc = avg_snr * sigma2;
        a * (a + 2.0 * gc - sigma2) / ((a + gc) * (a + gc))
    }
}

/// The exact mean interference of the γ̄-scaled power rule,
/// λ − c·ln(1 + λ/c) with c = σ²/(γ̄η). Agrees with [`PrintedRule`] at γ̄ = 1.
#[derive(Debug, Default)]
pub struct ExactAverageRule;

impl Named for ExactAverageRule {
    fn name(&self) -> &str {
        "exact-average"
    }
}

impl WaterLevelRule for ExactAverageRule {
    fn lhs(&self, lambda: f64, eta: f64, sigma2: f64, avg_snr: f64) -> f64 {
        let c = sigma2 / (avg_snr * eta);
        c * x_minus_ln1p(lambda / c)
    }

    fn lhs_derivative(&self, lambda: f64, eta: f64, sigma2: f64, avg_snr: f64) -> f64 {
        let v = lambda * avg_snr * eta / sigma2;
        v / (1.0 + v)
    }
}

pub fn water_rules() -> Registry<dyn WaterLevelRule> {
    let mut reg: Registry<dyn WaterLevelRule> = Registry::new("water-level rule");
    reg.register(Box::new(PrintedRule)).register(Box::new(ExactAverageRule));
    reg
}

/// The printed water-level constraint evaluated at λ.
pub fn constraint_lhs(lambda: f64, eta: f64, sigma2: f64, avg_snr: f64) -> f64 {
    PrintedRule.lhs(lambda, eta, sigma2, avg_snr)
}

/// Solves [`constraint_lhs`] = 10^(W/10) for λ.
pub fn water_level(eta: f64, sigma2: f64, avg_snr: f64, w_db: f64) -> Result<f64> {
    water_level_with(&PrintedRule, eta, sigma2, avg_snr, w_db)
}

const MAX_DOUBLINGS: usize = 200;
const RESIDUAL_TOL: f64 = 1e-10;

pub fn water_level_with(
    rule: &dyn WaterLevelRule,
    eta: f64,
    sigma2: f64,
    avg_snr: f64,
    w_db: f64,
) -> Result<f64> {
    for (name, v) in [("eta", eta), ("sigma2", sigma2), ("avg_snr", avg_snr)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain("water_level", format!("{name} must be positive, got {v}")));
        }
    }
    if !w_db.is_finite() {
        return Err(Error::domain("water_level", format!("W_dB must be finite, got {w_db}")));
    }
    let cap = crate::model::db_to_linear(w_db);
    if !(cap > 0.0) || !cap.is_finite() {
        return Err(Error::numerical("water_level", format!("cap 10^({w_db}/10) over- or underflows")));
    }
    let f = |l: f64| rule.lhs(l, eta, sigma2, avg_snr) - cap;

    let mut lo = 0.0;
    let mut hi = cap + (sigma2 / eta) * (1.0 + (eta * cap * 10.0 / (avg_snr * sigma2)).ln_1p());
    let mut doublings = 0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::numerical("water_level", "could not bracket the water level"));
        }
    }

    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let fx = f(x);
        if fx.abs() <= 0.1 * RESIDUAL_TOL * cap {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = rule.lhs_derivative(x, eta, sigma2, avg_snr);
        let step = if d > 0.0 { x - fx / d } else { f64::NAN };
        x = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    if (f(x) / cap).abs() > RESIDUAL_TOL {
        return Err(Error::numerical(
            "water_level",
            format!("residual {:e} above tolerance", f(x) / cap),
        ));
    }
    Ok(x)
}

/// Water-filling transmit power [λ/(l^(−ε)h₂) − σ²/(γ̄d^(−ε)f₂)]⁺.
#[allow(clippy::too_many_arguments)]
pub fn optimal_power(
    lambda: f64,
    f2: f64,
    h2: f64,
    d: f64,
    l: f64,
    sigma2: f64,
    avg_snr: f64,
    epsilon: f64,
) -> f64 {
    let p = lambda / (l.powf(-epsilon) * h2) - sigma2 / (avg_snr * d.powf(-epsilon) * f2);
    p.max(0.0)
}

/// Received SNR of a hop, [a₀·f₂/h₂ − 1]⁺.
pub fn hop_snr(law: &HopLaw, f2: f64, h2: f64) -> f64 {
    (law.shape_approx * f2 / h2 - 1.0).max(0.0)
}

/// Solves the water level of every hop in `topo`.
pub fn hop_laws(cfg: &SystemConfig, topo: &Topology) -> Result<Vec<HopLaw>> {
    let rules = water_rules();
    let rule = rules.get(&cfg.water_rule)?;
    topo.path_loss_ratios(cfg.path_loss_exponent)
        .into_iter()
        .map(|eta| solve_hop(rule, cfg, eta))
        .collect()
}

/// `K` identical hops at the configured path-loss ratio, with no geometry.
pub fn uniform_hop_laws(cfg: &SystemConfig) -> Result<Vec<HopLaw>> {
    let rules = water_rules();
    let rule = rules.get(&cfg.water_rule)?;
    let law = solve_hop(rule, cfg, cfg.path_loss_ratio)?;
    Ok(vec![law; cfg.hop_count])
}

fn solve_hop(rule: &dyn WaterLevelRule, cfg: &SystemConfig, eta: f64) -> Result<HopLaw> {
    let lambda = water_level_with(rule, eta, cfg.noise_variance, cfg.avg_snr, cfg.interference_cap_db)?;
    Ok(HopLaw::new(lambda, eta, cfg.noise_variance, cfg.avg_snr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::QuadOptions;
    use proptest::prelude::*;

    fn printed_direct(l: f64, eta: f64, s2: f64, g: f64) -> f64 {
        l * (eta * l + s2) / (eta * l + g * s2) - (s2 / eta) * (1.0 + eta * l / (g * s2)).ln()
    }

    /// λ = W + (σ²/η)·ln(1 + ηλ/σ²) at γ̄ = 1, iterated.
    fn fixed_point(eta: f64, s2: f64, cap: f64) -> f64 {
        let mut l = cap;
        for _ in 0..200 {
            l = cap + (s2 / eta) * (1.0 + eta * l / s2).ln();
        }
        l
    }

    #[test]
    fn reference_water_level() {
        let oracle = fixed_point(10.0, 1.0, 10.0);
        assert!((oracle - 10.4660).abs() < 1e-3);
        let l = water_level(10.0, 1.0, 1.0, 10.0).unwrap();
        assert!((l - oracle).abs() < 1e-10 * oracle);
        assert!((constraint_lhs(10.4660, 10.0, 1.0, 1.0) - 10.0).abs() < 1e-3);
        let law = HopLaw::new(l, 10.0, 1.0, 1.0);
        assert!((law.shape_exact - 105.660_228_554_85).abs() < 1e-8);
        assert_eq!(law.shape_exact, law.shape_approx + 1.0);
        assert_eq!(law.zero_prob, 1.0 / law.shape_exact);
    }

    #[test]
    fn stable_form_matches_printed_expression() {
        for &(l, eta, s2, g) in &[
            (10.4, 10.0, 1.0, 1.0),
            (0.3, 5.0, 2.0, 3.0),
            (7.0, 100.0, 1.0, 0.2),
            (1e3, 2.0, 0.5, 31.6),
        ] {
            let a = constraint_lhs(l, eta, s2, g);
            let b = printed_direct(l, eta, s2, g);
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn limits() {
        assert!(constraint_lhs(1e-12, 10.0, 1.0, 1.0).abs() < 1e-20);
        // σ²/η → 0 leaves λ.
        let v = constraint_lhs(3.0, 1e12, 1.0, 1.0);
        assert!((v - 3.0).abs() < 1e-9);
        let small = water_level(10.0, 1.0, 1.0, -80.0).unwrap();
        assert!(small > 0.0 && small < 1e-3);
        let big_eta = water_level(1e12, 1.0, 1.0, 10.0).unwrap();
        assert!((big_eta - 10.0).abs() < 1e-8);
    }

    #[test]
    fn round_trip_over_grid() {
        for &g in &[0.1, 0.5, 1.0, 3.16, 31.6, 1000.0] {
            for w in -10..=40 {
                let w = w as f64;
                let cap = crate::model::db_to_linear(w);
                for rule in water_rules().iter() {
                    let l = water_level_with(rule, 10.0, 1.0, g, w).unwrap();
                    let r = rule.lhs(l, 10.0, 1.0, g);
                    assert!(((r - cap) / cap).abs() <= 1e-9, "{} g={g} w={w}", rule.name());
                }
            }
        }
    }

    #[test]
    fn rules_coincide_at_unit_snr_scale() {
        for l in [0.01, 0.5, 3.0, 77.0] {
            let a = PrintedRule.lhs(l, 7.0, 1.3, 1.0);
            let b = ExactAverageRule.lhs(l, 7.0, 1.3, 1.0);
            assert!((a - b).abs() < 1e-13 * a.max(1e-300).max(1.0));
        }
    }

    /// E[(λ − c·h₂/f₂)⁺] for unit exponentials, by quadrature over the ratio
    /// density 1/(1+r)².
    #[test]
    fn exact_average_rule_is_the_mean_interference() {
        for &(l, eta, s2, g) in &[(2.0, 10.0, 1.0, 1.0), (0.7, 4.0, 2.0, 5.0), (10.0, 10.0, 1.0, 0.3)] {
            let c = s2 / (g * eta);
            let r_max = l / c;
            let q = crate::quad::integrate(
                |r| (l - c * r) / ((1.0 + r) * (1.0 + r)),
                0.0,
                r_max,
                QuadOptions::default(),
            )
            .unwrap();
            let rule = ExactAverageRule.lhs(l, eta, s2, g);
            assert!((q.value - rule).abs() < 1e-10 * rule, "{} vs {}", q.value, rule);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for rule in water_rules().iter() {
            for &(l, g) in &[(0.5, 1.0), (3.0, 0.3), (12.0, 10.0)] {
                let h = 1e-6 * l;
                let fd = (rule.lhs(l + h, 10.0, 1.0, g) - rule.lhs(l - h, 10.0, 1.0, g)) / (2.0 * h);
                let an = rule.lhs_derivative(l, 10.0, 1.0, g);
                assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{} {fd} {an}", rule.name());
            }
        }
    }

    #[test]
    fn power_examples() {
        assert_eq!(optimal_power(1.0, 1.0, 1.0, 1.0, 1.0, 0.25, 1.0, 4.0), 0.75);
        let law = HopLaw::new(0.1, 10.0, 1.0, 1.0);
        assert_eq!(law.shape_approx, 1.0);
        let law2 = HopLaw { shape_approx: 2.0, ..law };
        assert_eq!(hop_snr(&law2, 0.7, 0.7), 1.0);
        assert_eq!(hop_snr(&law2, 0.3, 0.7), 0.0);
        // Cutoff f₂ = σ²h₂/(γ̄λη).
        let (lam, eta, s2, g, eps) = (2.0, 10.0f64, 1.0, 1.0, 4.0);
        let d = eta.powf(-1.0 / eps);
        let h2 = 0.8;
        let f2 = s2 * h2 / (g * lam * eta);
        assert!(optimal_power(lam, f2, h2, d, 1.0, s2, g, eps).abs() < 1e-12);
    }

    #[test]
    fn unknown_rule_is_config_error() {
        let cfg = SystemConfig {
            water_rule: "nope".into(),
            ..SystemConfig::default()
        };
        assert!(matches!(uniform_hop_laws(&cfg), Err(Error::Config(_))));
    }

    proptest! {
        #[test]
        fn lhs_increasing(l1 in 1e-4f64..1e4, frac in 1e-6f64..1.0, eta in 1.1f64..1e3,
                          s2 in 0.1f64..10.0, g in 0.5f64..1e3) {
            let l2 = l1 * (1.0 + frac);
            for rule in water_rules().iter() {
                prop_assert!(rule.lhs(l1, eta, s2, g) < rule.lhs(l2, eta, s2, g));
            }
        }

        #[test]
        fn hop_snr_matches_power_path(f2 in 1e-3f64..20.0, h2 in 1e-3f64..20.0,
                                      eta in 1.5f64..100.0, eps in 2.0f64..6.0,
                                      l in 0.5f64..3.0, s2 in 0.1f64..4.0,
                                      g in 0.1f64..100.0, w in -10.0f64..40.0) {
            let d = l * eta.powf(-1.0 / eps);
            let eta_geo = (l / d).powf(eps);
            let lam = water_level(eta_geo, s2, g, w).unwrap();
            let law = HopLaw::new(lam, eta_geo, s2, g);
            let p = optimal_power(lam, f2, h2, d, l, s2, g, eps);
            let two_step = g * p * d.powf(-eps) * f2 / s2;
            let direct = hop_snr(&law, f2, h2);
            prop_assert!((two_step - direct).abs() <= 1e-12 * direct.max(1.0) * 10.0,
                "{} vs {}", two_step, direct);
        }
    }
}
