//! Per-TTI user selection for each pico cell under the five evaluated
//! strategies: half-duplex PF, full-duplex PF, PF with binary power
//! control, distance-aware UE pairing, and pairing with power control.
//!
//! Selection is interference-blind: candidates carry rate estimates built
//! from own-link SNR only, so permuting UE-to-UE gains never changes a
//! decision. Ties resolve to the lowest UE index (candidate lists are kept
//! in ascending index order).

use serde::{Deserialize, Serialize};

use crate::config::{PowerConfig, UpAlternation};
use crate::error::{Error, Result};
use crate::sumrate::{binary_power_control, PairContext};
use crate::topology::Position;

/// The five evaluated scheduling strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerKind {
    HdPf,
    FdPf,
    FdPfPc,
    FdUp,
    FdUpPc,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 5] = [
        SchedulerKind::HdPf,
        SchedulerKind::FdPf,
        SchedulerKind::FdPfPc,
        SchedulerKind::FdUp,
        SchedulerKind::FdUpPc,
    ];

    pub fn is_full_duplex(self) -> bool {
        !matches!(self, SchedulerKind::HdPf)
    }

    pub fn uses_power_control(self) -> bool {
        matches!(self, SchedulerKind::FdPfPc | SchedulerKind::FdUpPc)
    }

    pub fn uses_pairing(self) -> bool {
        matches!(self, SchedulerKind::FdUp | SchedulerKind::FdUpPc)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerKind::HdPf => "hd-pf",
            SchedulerKind::FdPf => "fd-pf",
            SchedulerKind::FdPfPc => "fd-pf-pc",
            SchedulerKind::FdUp => "fd-up",
            SchedulerKind::FdUpPc => "fd-up-pc",
        }
    }
}

impl std::fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hd-pf" => Ok(SchedulerKind::HdPf),
            "fd-pf" => Ok(SchedulerKind::FdPf),
            "fd-pf-pc" => Ok(SchedulerKind::FdPfPc),
            "fd-up" => Ok(SchedulerKind::FdUp),
            "fd-up-pc" => Ok(SchedulerKind::FdUpPc),
            other => Err(Error::Config(format!(
                "unknown scheduler '{other}' (expected one of hd-pf, fd-pf, fd-pf-pc, fd-up, fd-up-pc)"
            ))),
        }
    }
}

/// Windowed proportional-fair bookkeeping plus the per-cell leader
/// alternation flag used by UE pairing.
#[derive(Debug, Clone)]
pub struct PfState {
    avg_bps: Vec<f64>,
    window_ttis: f64,
    exponent: f64,
    floor_bps: f64,
    ul_first: Vec<bool>,
    alternation: UpAlternation,
}

impl PfState {
    /// Fresh state with every average at the floor and every cell starting
    /// on an UL-first turn.
    pub fn new(num_ues: usize, num_cells: usize, cfg: &crate::config::PfConfig) -> Self {
        Self {
            avg_bps: vec![cfg.floor_bps; num_ues],
            window_ttis: cfg.window_ttis,
            exponent: cfg.exponent,
            floor_bps: cfg.floor_bps,
            ul_first: vec![true; num_cells],
            alternation: cfg.up_alternation,
        }
    }

    pub fn avg_bps(&self, ue: usize) -> f64 {
        self.avg_bps[ue]
    }

    pub fn ul_first(&self, cell: usize) -> bool {
        self.ul_first[cell]
    }

    /// PF selection metric: `rate / avg^exponent`. The floor on averages
    /// keeps it finite for never-served UEs.
    pub fn pf_metric(&self, ue: usize, instantaneous_rate_bps: f64) -> f64 {
        instantaneous_rate_bps / self.avg_bps[ue].powf(self.exponent)
    }

    /// EWMA update over all UEs: `avg <- (1 - 1/W) avg + rate/W`, with
    /// rate 0 for unserved UEs (including UEs muted by power control), then
    /// clamped at the floor.
    pub fn pf_update(&mut self, served_ues_with_rates: &[(usize, f64)]) {
        let keep = 1.0 - 1.0 / self.window_ttis;
        for avg in &mut self.avg_bps {
            *avg *= keep;
        }
        for &(ue, rate_bps) in served_ues_with_rates {
            debug_assert!(rate_bps >= 0.0);
            self.avg_bps[ue] += rate_bps / self.window_ttis;
        }
        for avg in &mut self.avg_bps {
            *avg = avg.max(self.floor_bps);
        }
    }

    /// Advances the pairing-leader directions; call once per TTI with that
    /// TTI's decisions. Per-TTI alternation flips every cell; per-pairing
    /// alternation flips only cells that scheduled both directions.
    pub fn advance_turns(&mut self, decisions: &[SchedulingDecision]) {
        match self.alternation {
            UpAlternation::PerTti => {
                for turn in &mut self.ul_first {
                    *turn = !*turn;
                }
            }
            UpAlternation::PerPairing => {
                for d in decisions {
                    if d.ul_ue.is_some() && d.dl_ue.is_some() {
                        self.ul_first[d.cell] = !self.ul_first[d.cell];
                    }
                }
            }
        }
    }
}

/// One UE eligible for scheduling, with the engine's interference-blind
/// rate estimate for the metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub ue: usize,
    pub est_rate_bps: f64,
}

/// Per-cell candidate lists, each in ascending UE index order.
#[derive(Debug, Clone, Default)]
pub struct CellCandidates {
    pub ul: Vec<Candidate>,
    pub dl: Vec<Candidate>,
}

/// One cell's selection for one TTI. A direction without a scheduled UE
/// carries zero power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulingDecision {
    pub cell: usize,
    pub ul_ue: Option<usize>,
    pub dl_ue: Option<usize>,
    pub p_bs_mw: f64,
    pub p_ue_mw: f64,
}

impl SchedulingDecision {
    fn empty(cell: usize) -> Self {
        Self {
            cell,
            ul_ue: None,
            dl_ue: None,
            p_bs_mw: 0.0,
            p_ue_mw: 0.0,
        }
    }

    fn with_powers(mut self, power: &PowerConfig) -> Self {
        self.p_bs_mw = if self.dl_ue.is_some() { power.pico_tx_mw() } else { 0.0 };
        self.p_ue_mw = if self.ul_ue.is_some() { power.ue_tx_mw() } else { 0.0 };
        self
    }
}

fn pf_argmax(state: &PfState, cands: &[Candidate]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for c in cands {
        let metric = state.pf_metric(c.ue, c.est_rate_bps);
        // Strict > keeps the first (lowest-index) candidate on ties.
        if best.map_or(true, |(_, m)| metric > m) {
            best = Some((c.ue, metric));
        }
    }
    best.map(|(ue, _)| ue)
}

fn farthest_partner(
    leader: usize,
    cands: &[Candidate],
    ue_positions: &[Position],
) -> Option<usize> {
    let leader_pos = ue_positions[leader];
    let mut best: Option<(usize, f64)> = None;
    for c in cands {
        let d = leader_pos.distance(ue_positions[c.ue]);
        if best.map_or(true, |(_, bd)| d > bd) {
            best = Some((c.ue, d));
        }
    }
    best.map(|(ue, _)| ue)
}

/// Full-duplex PF: independent PF argmax per direction, full powers.
pub fn schedule_fd_pf(
    cell: usize,
    cands: &CellCandidates,
    state: &PfState,
    power: &PowerConfig,
) -> SchedulingDecision {
    SchedulingDecision {
        ul_ue: pf_argmax(state, &cands.ul),
        dl_ue: pf_argmax(state, &cands.dl),
        ..SchedulingDecision::empty(cell)
    }
    .with_powers(power)
}

/// Half-duplex FDD baseline: the same independent per-direction PF argmax;
/// each direction occupies its own half band downstream, so no inter-UE or
/// self-interference terms apply to the resulting links.
pub fn schedule_hd(
    cell: usize,
    cands: &CellCandidates,
    state: &PfState,
    power: &PowerConfig,
) -> SchedulingDecision {
    schedule_fd_pf(cell, cands, state, power)
}

/// Distance-aware UE pairing: the cell's leader direction (alternating per
/// TTI) picks its UE by PF, then the partner direction contributes the UE
/// farthest from the leader.
pub fn schedule_fd_up(
    cell: usize,
    cands: &CellCandidates,
    state: &PfState,
    power: &PowerConfig,
    ue_positions: &[Position],
) -> SchedulingDecision {
    let mut decision = SchedulingDecision::empty(cell);
    if state.ul_first(cell) {
        decision.ul_ue = pf_argmax(state, &cands.ul);
        decision.dl_ue = match decision.ul_ue {
            Some(leader) => farthest_partner(leader, &cands.dl, ue_positions),
            None => pf_argmax(state, &cands.dl),
        };
    } else {
        decision.dl_ue = pf_argmax(state, &cands.dl);
        decision.ul_ue = match decision.dl_ue {
            Some(leader) => farthest_partner(leader, &cands.ul, ue_positions),
            None => pf_argmax(state, &cands.ul),
        };
    }
    decision.with_powers(power)
}

/// Replaces the powers of a two-UE decision with the binary power-control
/// solution built from intra-cell quantities only. A muted UE stays
/// nominally scheduled and simply transmits nothing this TTI. Decisions
/// with fewer than two UEs pass through unchanged.
pub fn apply_binary_pc(
    decision: SchedulingDecision,
    ctx: &PairContext,
) -> Result<SchedulingDecision> {
    if decision.ul_ue.is_none() || decision.dl_ue.is_none() {
        return Ok(decision);
    }
    let solution = binary_power_control(ctx)?;
    Ok(SchedulingDecision {
        p_bs_mw: solution.p_bs_mw,
        p_ue_mw: solution.p_ue_mw,
        ..decision
    })
}
