//! Simulation configuration: transmit powers, duplexing, scheduler tuning,
//! run control and experiment plans, with TOML loading. Every section has
//! defaults matching the reference system parameters, so an empty file is a
//! valid config.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelConfig, SicModel};
use crate::error::{Error, Result};
use crate::scheduling::SchedulerKind;
use crate::topology::ScenarioConfig;

/// `10^(dBm / 10)`.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// `10 * log10(mW)`; requires a positive power.
pub fn mw_to_dbm(mw: f64) -> f64 {
    debug_assert!(mw > 0.0);
    10.0 * mw.log10()
}

/// Maximum transmit powers per node class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    pub macro_tx_dbm: f64,
    pub pico_tx_dbm: f64,
    pub ue_tx_dbm: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            macro_tx_dbm: 46.0,
            pico_tx_dbm: 24.0,
            ue_tx_dbm: 23.0,
        }
    }
}

impl PowerConfig {
    pub fn macro_tx_mw(&self) -> f64 {
        dbm_to_mw(self.macro_tx_dbm)
    }

    pub fn pico_tx_mw(&self) -> f64 {
        dbm_to_mw(self.pico_tx_dbm)
    }

    pub fn ue_tx_mw(&self) -> f64 {
        dbm_to_mw(self.ue_tx_dbm)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("macro_tx_dbm", self.macro_tx_dbm),
            ("pico_tx_dbm", self.pico_tx_dbm),
            ("ue_tx_dbm", self.ue_tx_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Duplexing parameters: the full-duplex system bandwidth and the
/// self-interference cancellation capability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DuplexConfig {
    pub bandwidth_hz: f64,
    pub sic_db: f64,
}

impl Default for DuplexConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 20e6,
            sic_db: 110.0,
        }
    }
}

impl DuplexConfig {
    pub fn sic(&self) -> Result<SicModel> {
        SicModel::new(self.sic_db)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config(format!(
                "bandwidth_hz must be positive, got {}",
                self.bandwidth_hz
            )));
        }
        self.sic()?;
        Ok(())
    }
}

/// Proportional-fair scheduler tuning.
/// When a pairing cell's leader direction flips between UL-first and
/// DL-first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UpAlternation {
    /// Every TTI, whether or not the cell paired.
    #[default]
    PerTti,
    /// Only after a TTI in which the cell scheduled both directions.
    PerPairing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PfConfig {
    /// EWMA averaging window in TTIs.
    pub window_ttis: f64,
    /// Fairness exponent applied to the average rate in the PF metric.
    pub exponent: f64,
    /// Floor on the average rate, in bits/s; keeps the metric bounded for
    /// never-served UEs.
    pub floor_bps: f64,
    /// Leader-direction alternation rule for the pairing schedulers.
    pub up_alternation: UpAlternation,
}

impl Default for PfConfig {
    fn default() -> Self {
        Self {
            window_ttis: 500.0,
            exponent: 0.05,
            floor_bps: 1e3,
            up_alternation: UpAlternation::PerTti,
        }
    }
}

impl PfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_ttis >= 1.0) {
            return Err(Error::Config(format!(
                "window_ttis must be at least 1, got {}",
                self.window_ttis
            )));
        }
        if !(self.exponent >= 0.0 && self.exponent.is_finite()) {
            return Err(Error::Config(format!(
                "exponent must be nonnegative, got {}",
                self.exponent
            )));
        }
        if !(self.floor_bps > 0.0) {
            return Err(Error::Config(format!(
                "floor_bps must be positive, got {}",
                self.floor_bps
            )));
        }
        Ok(())
    }
}

/// Run control: how long and how many drops, and the campaign seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub ttis: u32,
    pub tti_duration_s: f64,
    pub drops: u32,
    pub seed: u64,
    /// Optional cap on per-link spectral efficiency, in bits/s/Hz; `None`
    /// leaves Shannon rates uncapped.
    pub rate_cap_bps_per_hz: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ttis: 1000,
            tti_duration_s: 1e-3,
            drops: 100,
            seed: 1,
            rate_cap_bps_per_hz: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ttis == 0 {
            return Err(Error::Config("ttis must be at least 1".into()));
        }
        if self.drops == 0 {
            return Err(Error::Config("drops must be at least 1".into()));
        }
        if !(self.tti_duration_s > 0.0) {
            return Err(Error::Config(format!(
                "tti_duration_s must be positive, got {}",
                self.tti_duration_s
            )));
        }
        if let Some(cap) = self.rate_cap_bps_per_hz {
            if !(cap > 0.0) {
                return Err(Error::Config(format!(
                    "rate_cap_bps_per_hz must be positive, got {cap}"
                )));
            }
        }
        Ok(())
    }
}

/// Sweep axes for the comparison studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentPlan {
    pub schedulers: Vec<SchedulerKind>,
    pub sic_levels_db: Vec<f64>,
    pub pico_densities: Vec<u32>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            schedulers: vec![
                SchedulerKind::HdPf,
                SchedulerKind::FdPf,
                SchedulerKind::FdPfPc,
                SchedulerKind::FdUp,
                SchedulerKind::FdUpPc,
            ],
            sic_levels_db: vec![50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0],
            pico_densities: vec![3, 6, 9, 12, 15],
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.schedulers.is_empty() {
            return Err(Error::Config("schedulers must not be empty".into()));
        }
        if self.sic_levels_db.is_empty() {
            return Err(Error::Config("sic_levels_db must not be empty".into()));
        }
        if self.pico_densities.is_empty() {
            return Err(Error::Config("pico_densities must not be empty".into()));
        }
        for &level in &self.sic_levels_db {
            SicModel::new(level)?;
        }
        if self.pico_densities.iter().any(|&d| d == 0) {
            return Err(Error::Config("pico_densities entries must be positive".into()));
        }
        Ok(())
    }
}

/// Complete simulator configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: ScenarioConfig,
    pub channel: ChannelConfig,
    pub power: PowerConfig,
    pub duplex: DuplexConfig,
    pub pf: PfConfig,
    pub run: RunConfig,
    pub plan: ExperimentPlan,
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.channel.validate()?;
        self.power.validate()?;
        self.duplex.validate()?;
        self.pf.validate()?;
        self.run.validate()?;
        self.plan.validate()?;
        Ok(())
    }
}
