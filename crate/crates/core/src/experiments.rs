//! Parameter sweeps and figure datasets.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{
    e2e_cdf_k2, limiting_cdf, normalizer, outage_bounds, rate_approx, rate_bound, rate_k2, Bound,
};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, RunConfig, SystemConfig};
use crate::montecarlo::Scenario;
use crate::registry::{Named, Registry};

pub const CSV_HEADER: &str = "x,mc_value,mc_stderr,analytic_exact,bound_lower,bound_upper,limit_approx,trials,seed";

/// Quantity swept along the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepVariable {
    WDb,
    SnrDb,
    K,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub fixed: SystemConfig,
    pub gamma_th_db: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep has no values".into()));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        if self.variable == SweepVariable::K
            && self.values.iter().any(|&v| v < 1.0 || v.fract() != 0.0)
        {
            return Err(Error::Config("hop counts must be positive integers".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        Ok(())
    }

    fn config_at(&self, x: f64) -> SystemConfig {
        let mut cfg = self.fixed.clone();
        match self.variable {
            SweepVariable::WDb => cfg.interference_cap_db = x,
            SweepVariable::SnrDb => cfg.avg_snr = db_to_linear(x),
            SweepVariable::K => cfg.hop_count = x as usize,
        }
        cfg
    }
}

/// One row of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub mc_value: f64,
    pub mc_stderr: f64,
    pub analytic_exact: Option<f64>,
    pub bound_lower: Option<f64>,
    pub bound_upper: Option<f64>,
    pub limit_approx: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// A per-point statistic with its analytic companions.
pub trait Metric: Named + Send + Sync {
    fn point(&self, scenario: &Scenario, spec: &SweepSpec, x: f64) -> Result<CurvePoint>;
}

/// Identical-hop shape parameter, if all hops share one.
fn common_shape(scenario: &Scenario) -> Option<f64> {
    let a = scenario.laws[0].shape_exact;
    scenario.laws.iter().all(|l| (l.shape_exact - a).abs() <= 1e-9 * a).then_some(a)
}

fn shapes(scenario: &Scenario) -> Vec<f64> {
    scenario.laws.iter().map(|l| l.shape_exact).collect()
}

pub struct Outage;

impl Named for Outage {
    fn name(&self) -> &str {
        "outage"
    }
}

impl Metric for Outage {
    fn point(&self, scenario: &Scenario, spec: &SweepSpec, x: f64) -> Result<CurvePoint> {
        let th = db_to_linear(spec.gamma_th_db);
        let est = scenario.estimate_outage(th, spec.trials, spec.seed)?;
        if est.value * (est.trials as f64) < 10.0 {
            log::warn!(
                "outage at x={x} rests on {} events in {} trials and is statistically unresolved",
                (est.value * est.trials as f64).round(),
                est.trials
            );
        }
        let a = shapes(scenario);
        let k = a.len();
        let analytic_exact = if k == 2 { Some(e2e_cdf_k2(th, a[0], a[1])?) } else { None };
        let ob = outage_bounds(th, &a);
        let limit_approx = match common_shape(scenario) {
            Some(a0) if k >= 2 => Some(limiting_cdf(th / normalizer(k, a0, Bound::Upper)?.d_k)),
            _ => None,
        };
        Ok(CurvePoint {
            x,
            mc_value: est.value,
            mc_stderr: est.std_error,
            analytic_exact,
            bound_lower: Some(ob.lower),
            bound_upper: Some(ob.upper),
            limit_approx,
            trials: est.trials,
            seed: est.seed,
        })
    }
}

pub struct Rate;

impl Named for Rate {
    fn name(&self) -> &str {
        "rate"
    }
}

impl Metric for Rate {
    fn point(&self, scenario: &Scenario, spec: &SweepSpec, x: f64) -> Result<CurvePoint> {
        let est = scenario.estimate_rate(spec.trials, spec.seed)?;
        let a = shapes(scenario);
        let k = a.len();
        let analytic_exact = if k == 2 { Some(rate_k2(a[0], a[1])?) } else { None };
        let (bound_upper, limit_approx) = match common_shape(scenario) {
            Some(a0) if k >= 2 => (Some(rate_bound(k, a0)?), Some(rate_approx(k, a0)?.value)),
            _ => (None, None),
        };
        Ok(CurvePoint {
            x,
            mc_value: est.value,
            mc_stderr: est.std_error,
            analytic_exact,
            bound_lower: None,
            bound_upper,
            limit_approx,
            trials: est.trials,
            seed: est.seed,
        })
    }
}

pub fn metrics() -> Registry<dyn Metric> {
    let mut reg: Registry<dyn Metric> = Registry::new("metric");
    reg.register(Box::new(Outage)).register(Box::new(Rate));
    reg
}

/// Evaluates `metric` at every sweep value, one point at a time.
pub fn run_sweep(spec: &SweepSpec, metric: &dyn Metric) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    spec.values
        .iter()
        .map(|&x| {
            let scenario = Scenario::new(spec.config_at(x))?;
            metric.point(&scenario, spec, x)
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(mut out: impl Write, points: &[CurvePoint]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.x,
            p.mc_value,
            p.mc_stderr,
            opt(p.analytic_exact),
            opt(p.bound_lower),
            opt(p.bound_upper),
            opt(p.limit_approx),
            p.trials,
            p.seed
        )?;
    }
    Ok(())
}

pub fn to_csv_string(points: &[CurvePoint]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, points).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// One curve of a figure.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub metric: &'static str,
    pub spec: SweepSpec,
}

/// A figure recipe: the curves it is made of, derived from a base config.
pub trait Figure: Named + Send + Sync {
    fn series(&self, base: &RunConfig) -> Vec<Series>;
}

pub fn w_grid() -> Vec<f64> {
    (0..=15).map(|i| 2.0 * i as f64).collect()
}

pub fn snr_grid() -> Vec<f64> {
    (0..=6).map(|i| 5.0 * i as f64).collect()
}

fn spec(base: &RunConfig, k: usize, variable: SweepVariable, values: Vec<f64>) -> SweepSpec {
    let mut fixed = base.system();
    fixed.hop_count = k;
    SweepSpec {
        variable,
        values,
        fixed,
        gamma_th_db: base.gamma_th_db,
        trials: base.trials,
        seed: base.seed,
    }
}

fn with_w(mut s: SweepSpec, w: f64) -> SweepSpec {
    s.fixed.interference_cap_db = w;
    s
}

fn with_snr_db(mut s: SweepSpec, snr_db: f64) -> SweepSpec {
    s.fixed.avg_snr = db_to_linear(snr_db);
    s
}

fn hop_series(base: &RunConfig, metric: &'static str) -> Vec<Series> {
    [2, 4, 8]
        .into_iter()
        .map(|k| Series {
            label: format!("K{k}"),
            metric,
            spec: spec(base, k, SweepVariable::WDb, w_grid()),
        })
        .collect()
}

fn four_hop_series(base: &RunConfig, metric: &'static str) -> Vec<Series> {
    let mut out: Vec<Series> = [10.0, 30.0]
        .into_iter()
        .map(|w| Series {
            label: format!("snr_sweep_W{w}"),
            metric,
            spec: with_w(spec(base, 4, SweepVariable::SnrDb, snr_grid()), w),
        })
        .collect();
    out.push(Series {
        label: "W_sweep_snr15".into(),
        metric,
        spec: with_snr_db(spec(base, 4, SweepVariable::WDb, w_grid()), 15.0),
    });
    out
}

macro_rules! figure {
    ($ty:ident, $name:literal, $body:expr) => {
        pub struct $ty;
        impl Named for $ty {
            fn name(&self) -> &str {
                $name
            }
        }
        impl Figure for $ty {
            fn series(&self, base: &RunConfig) -> Vec<Series> {
                $body(base)
            }
        }
    };
}

figure!(OutageVsInterference, "3", |b| hop_series(b, "outage"));
figure!(FourHopOutage, "4", |b| four_hop_series(b, "outage"));
figure!(FourHopRate, "5", |b| four_hop_series(b, "rate"));
figure!(RateVsInterference, "6", |b| hop_series(b, "rate"));

pub fn figures() -> Registry<dyn Figure> {
    let mut reg: Registry<dyn Figure> = Registry::new("figure");
    reg.register(Box::new(OutageVsInterference))
        .register(Box::new(FourHopOutage))
        .register(Box::new(FourHopRate))
        .register(Box::new(RateVsInterference));
    reg
}

/// A computed figure curve.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub label: String,
    pub metric: &'static str,
    pub points: Vec<CurvePoint>,
}

pub fn run_figure(id: &str, base: &RunConfig) -> Result<Vec<Dataset>> {
    let figs = figures();
    let fig = figs.get(id)?;
    let mets = metrics();
    fig.series(base)
        .into_iter()
        .map(|s| {
            let points = run_sweep(&s.spec, mets.get(s.metric)?)?;
            Ok(Dataset {
                label: s.label,
                metric: s.metric,
                points,
            })
        })
        .collect()
}
