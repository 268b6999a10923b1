//! Simulation-backed checks of the analytic expressions.

use ssrelay::analysis::{e2e_cdf_k2, e2e_mgf, outage_bounds, rate_bound, rate_k2};
use ssrelay::model::SystemConfig;
use ssrelay::montecarlo::Scenario;
use ssrelay::waterfill::HopLaw;

fn laws_with_shapes(shapes: &[f64]) -> Scenario {
    // a = λη/σ² + 1 with η = 10, σ² = γ̄ = 1.
    let laws = shapes.iter().map(|&a| HopLaw::new((a - 1.0) / 10.0, 10.0, 1.0, 1.0)).collect::<Vec<_>>();
    let cfg = SystemConfig {
        hop_count: shapes.len(),
        ..SystemConfig::default()
    };
    Scenario::from_laws(cfg, laws).unwrap()
}

#[test]
fn two_hop_mgf_matches_simulation() {
    let sc = laws_with_shapes(&[50.0, 80.0]);
    let s = 0.1;
    let est = sc.estimate(10_000_000, 17, |t| (-s * t.e2e_snr).exp()).unwrap();
    let m = e2e_mgf(s, &[50.0, 80.0]).unwrap();
    assert!((est.value - m).abs() <= 3.0 * est.std_error, "{} ± {} vs {m}", est.value, est.std_error);
}

#[test]
fn two_hop_outage_at_reference_point() {
    let sc = Scenario::new(SystemConfig {
        hop_count: 2,
        ..SystemConfig::default()
    })
    .unwrap();
    let a = sc.laws[0].shape_exact;
    let est = sc.estimate_outage(1.0, 1_000_000, 23).unwrap();
    let exact = e2e_cdf_k2(1.0, a, a).unwrap();
    assert!((est.value - exact).abs() <= 3.0 * est.std_error, "{} vs {exact}", est.value);
}

#[test]
fn four_hop_outage_inside_bounds() {
    let sc = laws_with_shapes(&[105.66; 4]);
    let est = sc.estimate_outage(1.0, 1_000_000, 29).unwrap();
    let ob = outage_bounds(1.0, &[105.66; 4]);
    let tol = 3.0 * est.std_error;
    assert!(est.value >= ob.lower - tol && est.value <= ob.upper + tol);
}

#[test]
fn four_hop_rate_below_bound_at_20_db() {
    let sc = Scenario::new(SystemConfig {
        interference_cap_db: 20.0,
        ..SystemConfig::default()
    })
    .unwrap();
    let est = sc.estimate_rate(1_000_000, 31).unwrap();
    let bound = rate_bound(4, sc.laws[0].shape_exact).unwrap();
    assert!(est.value <= bound + 3.0 * est.std_error, "{} vs {bound}", est.value);
}

#[test]
fn two_hop_rate_matches_quadrature() {
    let sc = laws_with_shapes(&[105.66, 105.66]);
    let est = sc.estimate_rate(1_000_000, 37).unwrap();
    let exact = rate_k2(105.66, 105.66).unwrap();
    assert!((est.value - exact).abs() <= 3.0 * est.std_error, "{} vs {exact}", est.value);
}
