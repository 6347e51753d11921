//! Propagation model: per-link-class log-distance pathloss, log-normal
//! shadowing, cached linear gains, receiver noise and residual
//! self-interference.
//!
//! Links are classified by their endpoint roles. Gains are reciprocal: one
//! shadowing value is drawn per unordered node pair and the uplink classes
//! reuse the downlink propagation parameters, so `gain(a, b) == gain(b, a)`
//! holds exactly. All long-term randomness is drawn once per drop when the
//! gain matrix is built; the matrix stays fixed for every TTI of the drop.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{NodeRole, Position};

/// Propagation class of a link, derived from the endpoint roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkClass {
    MacroToUe,
    PicoToUe,
    UeToUe,
    PicoToPico,
    MacroToPico,
    UeToPico,
}

impl LinkClass {
    /// Classifies a transmitter-receiver role pair. Macro-to-macro links
    /// have no propagation model and are rejected.
    pub fn of(tx: NodeRole, rx: NodeRole) -> Result<LinkClass> {
        use NodeRole::*;
        let class = match (tx.is_ue(), rx.is_ue(), tx, rx) {
            (true, true, _, _) => LinkClass::UeToUe,
            (false, true, MacroBs, _) => LinkClass::MacroToUe,
            (false, true, PicoBs, _) => LinkClass::PicoToUe,
            (true, false, _, MacroBs) => LinkClass::MacroToUe,
            (true, false, _, PicoBs) => LinkClass::UeToPico,
            (false, false, PicoBs, PicoBs) => LinkClass::PicoToPico,
            (false, false, MacroBs, PicoBs) | (false, false, PicoBs, MacroBs) => {
                LinkClass::MacroToPico
            }
            (false, false, MacroBs, MacroBs) => {
                return Err(Error::Config(
                    "no propagation model for macro-to-macro links".into(),
                ))
            }
            _ => unreachable!("role pairs are covered above"),
        };
        Ok(class)
    }

    /// Canonical class that owns the propagation parameters; uplink
    /// direction aliases its downlink counterpart (reciprocity).
    pub fn canonical(self) -> LinkClass {
        match self {
            LinkClass::UeToPico => LinkClass::PicoToUe,
            other => other,
        }
    }
}

/// Log-distance pathloss: `intercept + slope * log10(d_km)`, optionally
/// switching to a second log-distance branch beyond `breakpoint_m`. The
/// three far-branch fields must be set together, and the far branch must
/// not undercut the near branch at the breakpoint (monotonicity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathlossModel {
    pub intercept_db: f64,
    pub slope_db_per_decade: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoint_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_intercept_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_slope_db_per_decade: Option<f64>,
}

impl PathlossModel {
    pub fn new(intercept_db: f64, slope_db_per_decade: f64) -> Self {
        Self {
            intercept_db,
            slope_db_per_decade,
            breakpoint_m: None,
            far_intercept_db: None,
            far_slope_db_per_decade: None,
        }
    }

    pub fn dual_slope(
        intercept_db: f64,
        slope_db_per_decade: f64,
        breakpoint_m: f64,
        far_intercept_db: f64,
        far_slope_db_per_decade: f64,
    ) -> Self {
        Self {
            intercept_db,
            slope_db_per_decade,
            breakpoint_m: Some(breakpoint_m),
            far_intercept_db: Some(far_intercept_db),
            far_slope_db_per_decade: Some(far_slope_db_per_decade),
        }
    }

    fn far_branch(&self) -> Option<(f64, f64, f64)> {
        match (
            self.breakpoint_m,
            self.far_intercept_db,
            self.far_slope_db_per_decade,
        ) {
            (Some(bp), Some(fi), Some(fs)) => Some((bp, fi, fs)),
            _ => None,
        }
    }

    /// Pathloss at a raw distance; callers clamp the distance first.
    pub fn pathloss_db(&self, distance_m: f64) -> f64 {
        let d_km = distance_m / 1000.0;
        if let Some((bp, fi, fs)) = self.far_branch() {
            if distance_m > bp {
                return fi + fs * d_km.log10();
            }
        }
        self.intercept_db + self.slope_db_per_decade * d_km.log10()
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.slope_db_per_decade >= 0.0) {
            return Err(Error::Config(format!(
                "{name}: slope_db_per_decade must be nonnegative"
            )));
        }
        let far_fields = [
            self.breakpoint_m.is_some(),
            self.far_intercept_db.is_some(),
            self.far_slope_db_per_decade.is_some(),
        ];
        if far_fields.iter().any(|&f| f) && !far_fields.iter().all(|&f| f) {
            return Err(Error::Config(format!(
                "{name}: breakpoint_m, far_intercept_db and far_slope_db_per_decade must be set together"
            )));
        }
        if let Some((bp, fi, fs)) = self.far_branch() {
            if !(bp > 0.0) {
                return Err(Error::Config(format!(
                    "{name}: breakpoint_m must be positive, got {bp}"
                )));
            }
            if !(fs >= 0.0) {
                return Err(Error::Config(format!(
                    "{name}: far_slope_db_per_decade must be nonnegative"
                )));
            }
            let bp_km = bp / 1000.0;
            let near_at_bp = self.intercept_db + self.slope_db_per_decade * bp_km.log10();
            let far_at_bp = fi + fs * bp_km.log10();
            if far_at_bp < near_at_bp {
                return Err(Error::Config(format!(
                    "{name}: far branch undercuts the near branch at the breakpoint ({far_at_bp:.2} dB < {near_at_bp:.2} dB)"
                )));
            }
        }
        Ok(())
    }
}

/// Propagation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// Distances are clamped below this before the pathloss formula.
    pub min_pathloss_distance_m: f64,
    pub thermal_noise_dbm_per_hz: f64,
    pub noise_figure_macro_db: f64,
    pub noise_figure_pico_db: f64,
    pub noise_figure_ue_db: f64,
    pub pathloss_macro_to_ue: PathlossModel,
    pub pathloss_pico_to_ue: PathlossModel,
    pub pathloss_ue_to_ue: PathlossModel,
    pub pathloss_pico_to_pico: PathlossModel,
    pub pathloss_macro_to_pico: PathlossModel,
    pub shadowing_macro_to_ue_db: f64,
    pub shadowing_pico_to_ue_db: f64,
    pub shadowing_ue_to_ue_db: f64,
    pub shadowing_pico_to_pico_db: f64,
    pub shadowing_macro_to_pico_db: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            min_pathloss_distance_m: 1.0,
            thermal_noise_dbm_per_hz: -174.0,
            noise_figure_macro_db: 5.0,
            noise_figure_pico_db: 13.0,
            noise_figure_ue_db: 9.0,
            pathloss_macro_to_ue: PathlossModel::new(128.1, 37.6),
            pathloss_pico_to_ue: PathlossModel::new(140.7, 36.7),
            pathloss_ue_to_ue: PathlossModel::dual_slope(98.45, 20.0, 50.0, 175.78, 40.0),
            pathloss_pico_to_pico: PathlossModel::new(169.36, 40.0),
            pathloss_macro_to_pico: PathlossModel::new(125.2, 36.3),
            shadowing_macro_to_ue_db: 10.0,
            shadowing_pico_to_ue_db: 10.0,
            shadowing_ue_to_ue_db: 12.0,
            shadowing_pico_to_pico_db: 6.0,
            shadowing_macro_to_pico_db: 6.0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_pathloss_distance_m > 0.0) {
            return Err(Error::Config(format!(
                "min_pathloss_distance_m must be positive, got {}",
                self.min_pathloss_distance_m
            )));
        }
        for (name, model) in [
            ("pathloss_macro_to_ue", &self.pathloss_macro_to_ue),
            ("pathloss_pico_to_ue", &self.pathloss_pico_to_ue),
            ("pathloss_ue_to_ue", &self.pathloss_ue_to_ue),
            ("pathloss_pico_to_pico", &self.pathloss_pico_to_pico),
            ("pathloss_macro_to_pico", &self.pathloss_macro_to_pico),
        ] {
            model.validate(name)?;
        }
        for (name, sigma) in [
            ("shadowing_macro_to_ue_db", self.shadowing_macro_to_ue_db),
            ("shadowing_pico_to_ue_db", self.shadowing_pico_to_ue_db),
            ("shadowing_ue_to_ue_db", self.shadowing_ue_to_ue_db),
            ("shadowing_pico_to_pico_db", self.shadowing_pico_to_pico_db),
            ("shadowing_macro_to_pico_db", self.shadowing_macro_to_pico_db),
        ] {
            if !(sigma >= 0.0) {
                return Err(Error::Config(format!("{name} must be nonnegative, got {sigma}")));
            }
        }
        Ok(())
    }

    fn model(&self, class: LinkClass) -> &PathlossModel {
        match class.canonical() {
            LinkClass::MacroToUe => &self.pathloss_macro_to_ue,
            LinkClass::PicoToUe => &self.pathloss_pico_to_ue,
            LinkClass::UeToUe => &self.pathloss_ue_to_ue,
            LinkClass::PicoToPico => &self.pathloss_pico_to_pico,
            LinkClass::MacroToPico => &self.pathloss_macro_to_pico,
            LinkClass::UeToPico => unreachable!("canonicalised above"),
        }
    }

    pub fn shadowing_sigma_db(&self, class: LinkClass) -> f64 {
        match class.canonical() {
            LinkClass::MacroToUe => self.shadowing_macro_to_ue_db,
            LinkClass::PicoToUe => self.shadowing_pico_to_ue_db,
            LinkClass::UeToUe => self.shadowing_ue_to_ue_db,
            LinkClass::PicoToPico => self.shadowing_pico_to_pico_db,
            LinkClass::MacroToPico => self.shadowing_macro_to_pico_db,
            LinkClass::UeToPico => unreachable!("canonicalised above"),
        }
    }

    /// Distance-dependent pathloss in dB; distances below the clamp are
    /// treated as the clamp distance.
    pub fn pathloss_db(&self, class: LinkClass, distance_m: f64) -> f64 {
        self.model(class)
            .pathloss_db(distance_m.max(self.min_pathloss_distance_m))
    }

    /// One log-normal shadowing draw for the class, in dB.
    pub fn sample_shadowing(&self, class: LinkClass, rng: &mut impl Rng) -> f64 {
        let sigma = self.shadowing_sigma_db(class);
        if sigma <= 0.0 {
            return 0.0;
        }
        Normal::new(0.0, sigma)
            .expect("validated sigma")
            .sample(rng)
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel {
            thermal_noise_dbm_per_hz: self.thermal_noise_dbm_per_hz,
            noise_figure_macro_db: self.noise_figure_macro_db,
            noise_figure_pico_db: self.noise_figure_pico_db,
            noise_figure_ue_db: self.noise_figure_ue_db,
        }
    }
}

/// Combines pathloss and shadowing into a linear power gain. The total
/// attenuation is clamped at 0 dB so gains stay in `(0, 1]` even when a
/// deep negative shadowing draw meets a clamped distance.
pub fn link_gain(pathloss_db: f64, shadow_db: f64) -> f64 {
    let total_db = (pathloss_db + shadow_db).max(0.0);
    10f64.powf(-total_db / 10.0)
}

/// Thermal noise plus per-role receiver noise figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub thermal_noise_dbm_per_hz: f64,
    pub noise_figure_macro_db: f64,
    pub noise_figure_pico_db: f64,
    pub noise_figure_ue_db: f64,
}

impl NoiseModel {
    pub fn noise_figure_db(&self, receiver: NodeRole) -> f64 {
        match receiver {
            NodeRole::MacroBs => self.noise_figure_macro_db,
            NodeRole::PicoBs => self.noise_figure_pico_db,
            NodeRole::UplinkUe | NodeRole::DownlinkUe => self.noise_figure_ue_db,
        }
    }

    /// Linear noise power in mW over `bandwidth_hz` at the given receiver.
    /// Computed linearly, so halving the bandwidth exactly halves the
    /// power.
    pub fn power_mw(&self, receiver: NodeRole, bandwidth_hz: f64) -> f64 {
        10f64.powf(self.thermal_noise_dbm_per_hz / 10.0)
            * bandwidth_hz
            * 10f64.powf(self.noise_figure_db(receiver) / 10.0)
    }
}

/// Self-interference cancellation: the residual coefficient scales the own
/// transmit power that leaks into the co-located receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SicModel {
    sic_db: f64,
}

impl SicModel {
    pub const MIN_DB: f64 = 50.0;
    pub const MAX_DB: f64 = 110.0;

    pub fn new(sic_db: f64) -> Result<Self> {
        if !(Self::MIN_DB..=Self::MAX_DB).contains(&sic_db) {
            return Err(Error::Config(format!(
                "sic_db must lie in [{}, {}], got {sic_db}",
                Self::MIN_DB,
                Self::MAX_DB
            )));
        }
        Ok(Self { sic_db })
    }

    pub fn sic_db(&self) -> f64 {
        self.sic_db
    }

    /// Linear residual coefficient `10^(-sic_db / 10)`.
    pub fn residual_coefficient(&self) -> f64 {
        10f64.powf(-self.sic_db / 10.0)
    }

    /// Residual self-interference power in mW for a given transmit power.
    pub fn residual_power_mw(&self, tx_power_mw: f64) -> f64 {
        self.residual_coefficient() * tx_power_mw
    }
}

/// Dense symmetric matrix of long-term linear gains over all nodes of a
/// drop, in the layout's global node order (macros, picos, UEs).
///
/// Entries without a propagation model (self links, macro-macro pairs) are
/// NaN and must not be queried through [`GainMatrix::gain`].
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    n: usize,
    gain: Vec<f64>,
    pathloss_db: Vec<f64>,
    shadow_db: Vec<f64>,
}

impl GainMatrix {
    /// Matrix with every entry undefined; used by tests and synthetic
    /// studies that fill gains by hand.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            gain: vec![f64::NAN; n * n],
            pathloss_db: vec![f64::NAN; n * n],
            shadow_db: vec![f64::NAN; n * n],
        }
    }

    /// Builds the matrix for a drop. One shadowing value is drawn per
    /// unordered pair in ascending `(a, b)` order, so the result is
    /// bit-exactly reproducible from the node lists and the RNG state.
    pub fn build(
        macros: &[Position],
        picos: &[Position],
        ues: &[Position],
        cfg: &ChannelConfig,
        rng: &mut impl Rng,
    ) -> Self {
        let n = macros.len() + picos.len() + ues.len();
        let role_of = |i: usize| -> NodeRole {
            if i < macros.len() {
                NodeRole::MacroBs
            } else if i < macros.len() + picos.len() {
                NodeRole::PicoBs
            } else {
                // UL/DL does not matter for propagation.
                NodeRole::UplinkUe
            }
        };
        let pos_of = |i: usize| -> Position {
            if i < macros.len() {
                macros[i]
            } else if i < macros.len() + picos.len() {
                picos[i - macros.len()]
            } else {
                ues[i - macros.len() - picos.len()]
            }
        };
        let mut matrix = Self::empty(n);
        for a in 0..n {
            for b in (a + 1)..n {
                let Ok(class) = LinkClass::of(role_of(a), role_of(b)) else {
                    continue;
                };
                let pl = cfg.pathloss_db(class, pos_of(a).distance(pos_of(b)));
                let sh = cfg.sample_shadowing(class, rng);
                matrix.set_entry(a, b, pl, sh);
            }
        }
        matrix
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.n && b < self.n);
        a * self.n + b
    }

    fn set_entry(&mut self, a: usize, b: usize, pathloss_db: f64, shadow_db: f64) {
        let g = link_gain(pathloss_db, shadow_db);
        for (i, j) in [(a, b), (b, a)] {
            let k = self.idx(i, j);
            self.gain[k] = g;
            self.pathloss_db[k] = pathloss_db;
            self.shadow_db[k] = shadow_db;
        }
    }

    /// Overrides one pair with an explicit linear gain (tests, synthetic
    /// geometries). The stored pathloss becomes the equivalent attenuation.
    pub fn set_gain(&mut self, a: usize, b: usize, gain: f64) {
        assert!(gain > 0.0 && gain <= 1.0, "gain must lie in (0, 1]");
        self.set_entry(a, b, -10.0 * gain.log10(), 0.0);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Linear gain between two distinct nodes; the entry must exist.
    #[inline]
    pub fn gain(&self, a: usize, b: usize) -> f64 {
        let g = self.gain[self.idx(a, b)];
        debug_assert!(g.is_finite(), "undefined gain entry ({a}, {b})");
        g
    }

    /// Checked lookup for callers that may hit undefined entries.
    pub fn try_gain(&self, a: usize, b: usize) -> Result<f64> {
        if a == b {
            return Err(Error::Domain(format!("self link gain requested for node {a}")));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::Domain(format!(
                "gain index ({a}, {b}) out of range for {} nodes",
                self.n
            )));
        }
        let g = self.gain[self.idx(a, b)];
        if g.is_finite() {
            Ok(g)
        } else {
            Err(Error::Domain(format!("no propagation model between nodes {a} and {b}")))
        }
    }

    pub fn pathloss_db(&self, a: usize, b: usize) -> f64 {
        self.pathloss_db[self.idx(a, b)]
    }

    pub fn shadow_db(&self, a: usize, b: usize) -> f64 {
        self.shadow_db[self.idx(a, b)]
    }

    /// Writes one row per defined unordered pair:
    /// `tx_id,rx_id,pathloss_db,shadow_db,gain_linear`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["tx_id", "rx_id", "pathloss_db", "shadow_db", "gain_linear"])?;
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let k = self.idx(a, b);
                if self.gain[k].is_finite() {
                    wtr.write_record([
                        a.to_string(),
                        b.to_string(),
                        self.pathloss_db[k].to_string(),
                        self.shadow_db[k].to_string(),
                        self.gain[k].to_string(),
                    ])?;
                }
            }
        }
        wtr.flush()?;
        Ok(())
    }
}
