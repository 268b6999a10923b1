//! Scenario configuration, unit conversions and the linear-chain geometry.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// How a hop whose water-filling power is zero is treated by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroAtomMode {
    /// Redraw the hop's fading pair until it transmits (the law every
    /// closed-form expression describes).
    #[default]
    Conditioned,
    /// Keep silent hops; the end-to-end SNR of such a trial is zero.
    Physical,
}

/// Scalars describing one relay-chain scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub hop_count: usize,
    /// ε ≥ 2.
    pub path_loss_exponent: f64,
    /// η = (l/d)^ε, desired-to-interference large-scale gain ratio.
    pub path_loss_ratio: f64,
    /// σ², identical at every node.
    pub noise_variance: f64,
    /// W in dB; the linear cap is 10^(W/10).
    pub interference_cap_db: f64,
    /// γ̄, linear symbol-energy scale.
    pub avg_snr: f64,
    /// Constellation constant p (2 for BPSK).
    pub constellation_const: f64,
    pub zero_atom_mode: ZeroAtomMode,
    /// Registered water-level rule, see [`crate::waterfill::water_rules`].
    pub water_rule: String,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            hop_count: 4,
            path_loss_exponent: 4.0,
            path_loss_ratio: 10.0,
            noise_variance: 1.0,
            interference_cap_db: 10.0,
            avg_snr: 1.0,
            constellation_const: 2.0,
            zero_atom_mode: ZeroAtomMode::Conditioned,
            water_rule: crate::waterfill::DEFAULT_WATER_RULE.to_string(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hop_count < 1 {
            return Err(Error::Config("hop count K must be at least 1".into()));
        }
        if !(self.path_loss_exponent >= 2.0) {
            return Err(Error::Config(format!(
                "path-loss exponent must be >= 2, got {}",
                self.path_loss_exponent
            )));
        }
        for (name, v) in [
            ("path-loss ratio eta", self.path_loss_ratio),
            ("noise variance sigma2", self.noise_variance),
            ("average SNR scale", self.avg_snr),
            ("constellation constant p", self.constellation_const),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.interference_cap_db.is_finite() {
            return Err(Error::Config("interference cap W_dB must be finite".into()));
        }
        Ok(())
    }

    pub fn interference_cap(&self) -> f64 {
        db_to_linear(self.interference_cap_db)
    }
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// The flat JSON document accepted by the CLI. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "K")]
    pub k: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub sigma2: f64,
    #[serde(rename = "W_dB")]
    pub w_db: f64,
    #[serde(rename = "snr_dB")]
    pub snr_db: f64,
    pub p: f64,
    pub zero_atom_mode: ZeroAtomMode,
    pub trials: u64,
    pub seed: u64,
    #[serde(rename = "gamma_th_dB")]
    pub gamma_th_db: f64,
    pub water_rule: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sys = SystemConfig::default();
        Self {
            k: sys.hop_count,
            epsilon: sys.path_loss_exponent,
            eta: sys.path_loss_ratio,
            sigma2: sys.noise_variance,
            w_db: sys.interference_cap_db,
            snr_db: 0.0,
            p: sys.constellation_const,
            zero_atom_mode: sys.zero_atom_mode,
            trials: 1_000_000,
            seed: 1,
            gamma_th_db: 0.0,
            water_rule: sys.water_rule,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.system().validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if !self.gamma_th_db.is_finite() || !self.snr_db.is_finite() {
            return Err(Error::Config("gamma_th_dB and snr_dB must be finite".into()));
        }
        Ok(())
    }

    pub fn system(&self) -> SystemConfig {
        SystemConfig {
            hop_count: self.k,
            path_loss_exponent: self.epsilon,
            path_loss_ratio: self.eta,
            noise_variance: self.sigma2,
            interference_cap_db: self.w_db,
            avg_snr: db_to_linear(self.snr_db),
            constellation_const: self.p,
            zero_atom_mode: self.zero_atom_mode,
            water_rule: self.water_rule.clone(),
        }
    }

    pub fn gamma_th(&self) -> f64 {
        db_to_linear(self.gamma_th_db)
    }
}

/// Per-hop desired-link (`d`) and interference-link (`l`) distances;
/// hop k joins node k−1 to node k and `l[k]` is measured from node k−1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Topology {
    pub desired: Vec<f64>,
    pub interference: Vec<f64>,
}

impl Topology {
    pub fn from_distances(desired: Vec<f64>, interference: Vec<f64>) -> Result<Self> {
        if desired.len() != interference.len() || desired.is_empty() {
            return Err(Error::Config("distance vectors must be nonempty and equally long".into()));
        }
        if desired.iter().chain(&interference).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Config("distances must be positive and finite".into()));
        }
        Ok(Self {
            desired,
            interference,
        })
    }

    pub fn hop_count(&self) -> usize {
        self.desired.len()
    }

    /// η_k = (l_k / d_k)^ε for every hop.
    pub fn path_loss_ratios(&self, epsilon: f64) -> Vec<f64> {
        self.desired
            .iter()
            .zip(&self.interference)
            .map(|(d, l)| (l / d).powf(epsilon))
            .collect()
    }
}

/// Places SU₀..SU_K on a straight line whose perpendicular through SU_{K/2}
/// hits the primary receiver at unit distance, with every hop satisfying
/// d_k = l_k · η^(−1/ε).
pub fn build_topology(hops: usize, eta: f64, epsilon: f64) -> Result<Topology> {
    if hops == 0 || hops % 2 == 1 {
        return Err(Error::UnsupportedLayout(format!(
            "the canonical chain needs an even hop count, got K={hops}"
        )));
    }
    if !(epsilon >= 2.0) || !(eta > 0.0) {
        return Err(Error::Config(format!(
            "need eta > 0 and epsilon >= 2, got eta={eta}, epsilon={epsilon}"
        )));
    }
    let rho = eta.powf(-1.0 / epsilon);
    let rho2 = rho * rho;
    if rho2 >= 1.0 {
        return Err(Error::DegenerateGeometry(format!(
            "eta={eta} <= 1 leaves no node placement towards the source"
        )));
    }
    let half = hops / 2;
    let mut desired = vec![0.0; hops];
    let mut interference = vec![0.0; hops];

    // Towards the destination: hop k (1-based, k > K/2) starts at offset x.
    let mut x = 0.0f64;
    for k in half..hops {
        let l = (1.0 + x * x).sqrt();
        let d = l * rho;
        interference[k] = l;
        desired[k] = d;
        x += d;
    }

    // Towards the source: offsets grow leftwards from SU_{K/2} at 0. The
    // transmitter of hop k sits at y, the larger root of
    // (y − x)² = ρ²(1 + y²).
    let mut x = 0.0f64;
    for k in (0..half).rev() {
        let y = (x + rho * (x * x + 1.0 - rho2).sqrt()) / (1.0 - rho2);
        interference[k] = (1.0 + y * y).sqrt();
        desired[k] = y - x;
        x = y;
    }
    Topology::from_distances(desired, interference)
}
