//! Reproducible Monte-Carlo engine for the relay chain.
//!
//! Every random number is a pure function of (seed, trial, hop, role, draw),
//! so trials can run on any number of workers. Trials are grouped into
//! fixed-size blocks; each block is reduced locally and the block partials
//! are merged in block order, which makes every estimate bit-identical
//! regardless of the thread count.

mod philox;

pub use philox::philox4x32;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_topology, SystemConfig, Topology, ZeroAtomMode};
use crate::waterfill::{hop_laws, hop_snr, optimal_power, uniform_hop_laws, HopLaw};

const BLOCK: u64 = 4096;
/// Redraw budget per hop in conditioned mode before switching to the
/// inverse-CDF draw of the conditioned law.
const MAX_REDRAWS: u32 = 1 << 20;

/// Which fading coefficient of a hop is being drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// |f_k|², the desired link.
    Desired = 0,
    /// |h_k|², the link to the primary receiver.
    Interference = 1,
}

/// Full coordinates of one random draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    pub seed: u64,
    pub trial: u64,
    pub hop: u32,
    pub role: Role,
    pub draw: u32,
}

impl StreamKey {
    pub fn uniform(&self) -> f64 {
        let key = [self.seed as u32, (self.seed >> 32) as u32];
        let ctr = [
            self.trial as u32,
            (self.trial >> 32) as u32,
            (self.hop << 1) | self.role as u32,
            self.draw,
        ];
        let w = philox4x32(ctr, key);
        philox::to_unit(w[0], w[1])
    }
}

/// Unit-mean exponential by inversion, −ln(1 − u).
pub fn exp_from_uniform(u: f64) -> f64 {
    -(-u).ln_1p()
}

/// Unit-mean exponential fading power for `key`.
pub fn sample_hop(key: StreamKey) -> f64 {
    exp_from_uniform(key.uniform())
}

/// One fading pair of a hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    pub f2: f64,
    pub h2: f64,
}

pub fn sample_channel(seed: u64, trial: u64, hop: u32, draw: u32) -> ChannelSample {
    let key = |role| StreamKey {
        seed,
        trial,
        hop,
        role,
        draw,
    };
    ChannelSample {
        f2: sample_hop(key(Role::Desired)),
        h2: sample_hop(key(Role::Interference)),
    }
}

/// SNR of one hop in one trial under the given zero-atom treatment.
pub fn draw_hop_snr(law: &HopLaw, mode: ZeroAtomMode, seed: u64, trial: u64, hop: u32) -> f64 {
    let first = sample_channel(seed, trial, hop, 0);
    let g = hop_snr(law, first.f2, first.h2);
    if g > 0.0 || mode == ZeroAtomMode::Physical {
        return g;
    }
    for draw in 1..MAX_REDRAWS {
        let c = sample_channel(seed, trial, hop, draw);
        let g = hop_snr(law, c.f2, c.h2);
        if g > 0.0 {
            return g;
        }
    }
    let u = StreamKey {
        seed,
        trial,
        hop,
        role: Role::Desired,
        draw: MAX_REDRAWS,
    }
    .uniform();
    law.shape_exact * u / (1.0 - u)
}

/// Per-trial outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub per_hop_snr: Vec<f64>,
    pub e2e_snr: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
}

/// γ_e2e = (Σ 1/γ_k)^(−1), zero if any hop is silent.
pub fn e2e_snr(per_hop: &[f64]) -> f64 {
    if let [g] = per_hop {
        return g.max(0.0);
    }
    let mut inv = 0.0;
    for &g in per_hop {
        if g <= 0.0 {
            return 0.0;
        }
        inv += 1.0 / g;
    }
    1.0 / inv
}

/// The quantities estimators need, without allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub e2e_snr: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
}

/// Everything needed to simulate one configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: SystemConfig,
    pub topology: Option<Topology>,
    pub laws: Vec<HopLaw>,
}

impl Scenario {
    /// Builds the canonical chain for even K and solves its water levels.
    pub fn new(config: SystemConfig) -> Result<Self> {
        config.validate()?;
        let topo = build_topology(config.hop_count, config.path_loss_ratio, config.path_loss_exponent)?;
        let laws = hop_laws(&config, &topo)?;
        Ok(Self {
            config,
            topology: Some(topo),
            laws,
        })
    }

    /// K identical hops without geometry; accepts any K ≥ 1.
    pub fn uniform(config: SystemConfig) -> Result<Self> {
        config.validate()?;
        let laws = uniform_hop_laws(&config)?;
        Ok(Self {
            config,
            topology: None,
            laws,
        })
    }

    pub fn from_laws(config: SystemConfig, laws: Vec<HopLaw>) -> Result<Self> {
        if laws.is_empty() {
            return Err(Error::Config("at least one hop law is required".into()));
        }
        Ok(Self {
            config,
            topology: None,
            laws,
        })
    }

    pub fn hop_count(&self) -> usize {
        self.laws.len()
    }

    fn fill_hops(&self, seed: u64, trial: u64, buf: &mut [f64]) {
        let mode = self.config.zero_atom_mode;
        for (k, (law, slot)) in self.laws.iter().zip(buf.iter_mut()).enumerate() {
            *slot = draw_hop_snr(law, mode, seed, trial, k as u32);
        }
    }

    fn summarize(buf: &[f64]) -> TrialSummary {
        let upper = buf.iter().copied().fold(f64::INFINITY, f64::min);
        TrialSummary {
            e2e_snr: e2e_snr(buf),
            bound_upper: upper,
            bound_lower: upper / buf.len() as f64,
        }
    }

    pub fn run_trial(&self, seed: u64, trial: u64) -> TrialResult {
        let mut per_hop = vec![0.0; self.hop_count()];
        self.fill_hops(seed, trial, &mut per_hop);
        let s = Self::summarize(&per_hop);
        TrialResult {
            per_hop_snr: per_hop,
            e2e_snr: s.e2e_snr,
            bound_lower: s.bound_lower,
            bound_upper: s.bound_upper,
        }
    }

    /// Runs `trials` trials and returns one [`Estimate`] per statistic.
    pub fn estimate_many<F>(&self, trials: u64, seed: u64, stats: &[F]) -> Result<Vec<Estimate>>
    where
        F: Fn(&TrialSummary) -> f64 + Sync,
    {
        if trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        let blocks = trials.div_ceil(BLOCK);
        let partials: Vec<Vec<Welford>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = vec![Welford::default(); stats.len()];
                let mut buf = vec![0.0; self.hop_count()];
                let end = ((b + 1) * BLOCK).min(trials);
                for t in b * BLOCK..end {
                    self.fill_hops(seed, t, &mut buf);
                    let s = Self::summarize(&buf);
                    for (a, f) in acc.iter_mut().zip(stats) {
                        a.push(f(&s));
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![Welford::default(); stats.len()];
        for part in &partials {
            for (t, p) in total.iter_mut().zip(part) {
                t.merge(p);
            }
        }
        Ok(total.iter().map(|w| w.estimate(seed)).collect())
    }

    pub fn estimate<F>(&self, trials: u64, seed: u64, stat: F) -> Result<Estimate>
    where
        F: Fn(&TrialSummary) -> f64 + Sync,
    {
        Ok(self.estimate_many(trials, seed, &[stat])?.remove(0))
    }

    /// Pr{γ_e2e < γ_th}.
    pub fn estimate_outage(&self, gamma_th: f64, trials: u64, seed: u64) -> Result<Estimate> {
        self.estimate(trials, seed, |s| if s.e2e_snr < gamma_th { 1.0 } else { 0.0 })
    }

    /// E[(1/K)·log₂(1 + γ_e2e)].
    pub fn estimate_rate(&self, trials: u64, seed: u64) -> Result<Estimate> {
        let k = self.hop_count() as f64;
        self.estimate(trials, seed, move |s| (s.e2e_snr).ln_1p() / (k * std::f64::consts::LN_2))
    }

    /// Mean interference power P·l^(−ε)·h₂ caused by `hop` at the primary
    /// receiver, over unconditioned fading draws.
    pub fn estimate_interference(&self, hop: usize, trials: u64, seed: u64) -> Result<Estimate> {
        let topo = self
            .topology
            .as_ref()
            .ok_or_else(|| Error::Config("interference estimate needs a topology".into()))?;
        if hop >= self.hop_count() {
            return Err(Error::Config(format!("hop index {hop} out of range")));
        }
        if trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        let cfg = &self.config;
        let (d, l) = (topo.desired[hop], topo.interference[hop]);
        let lambda = self.laws[hop].water_level;
        let eps = cfg.path_loss_exponent;
        let blocks = trials.div_ceil(BLOCK);
        let partials: Vec<Welford> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = Welford::default();
                for t in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                    let c = sample_channel(seed, t, hop as u32, 0);
                    let p = optimal_power(lambda, c.f2, c.h2, d, l, cfg.noise_variance, cfg.avg_snr, eps);
                    acc.push(p * l.powf(-eps) * c.h2);
                }
                acc
            })
            .collect();
        let mut total = Welford::default();
        for p in &partials {
            total.merge(p);
        }
        Ok(total.estimate(seed))
    }
}

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Welford) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64);
        self.n = n;
    }

    fn estimate(&self, seed: u64) -> Estimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        Estimate {
            value: self.mean,
            std_error: (var.max(0.0) / self.n as f64).sqrt(),
            trials: self.n,
            seed,
        }
    }
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empirical_cdf", "no samples"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::domain("empirical_cdf", "NaN sample"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    /// (value, rank/n) steps; ties keep only the last rank.
    pub fn table(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            let p = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = p,
                _ => out.push((x, p)),
            }
        }
        out
    }

    /// Kolmogorov distance sup_x |F_n(x) − F(x)| to a continuous CDF.
    pub fn sup_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                ((i + 1) as f64 / n - f).max(f - i as f64 / n)
            })
            .fold(0.0, f64::max)
    }
}

pub fn empirical_cdf(samples: Vec<f64>) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(samples)
}
