//! Per-TTI simulation loop: schedule every pico cell, realize transmit
//! powers, compute every receiver's SINR with full interference
//! accounting, convert to Shannon rates, update PF state, and accumulate
//! throughput, energy and interference statistics.
//!
//! The macro tier is out of band: it shapes association only and never
//! appears in SINR terms, traffic, or energy. The half-duplex baseline is
//! FDD over two half bands referenced to the full-band SINR: each
//! direction carries half the bandwidth in its rate at unchanged noise
//! power and sees no cross-direction interference, so an isolated
//! full-duplex cell approaches exactly twice the half-duplex rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{GainMatrix, SicModel};
use crate::config::{mw_to_dbm, SimConfig};
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, stream};
use crate::scheduling::{
    apply_binary_pc, schedule_fd_pf, schedule_fd_up, schedule_hd, Candidate, CellCandidates,
    PfState, SchedulerKind, SchedulingDecision,
};
use crate::sumrate::PairContext;
use crate::topology::{
    associate_ues, designate_roles, drop_picos, drop_ues, generate_macro_layout, NetworkLayout,
    NodeRole, ServingCell,
};

/// Band arrangement realized by the active scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuplexMode {
    FullDuplex,
    HalfDuplex,
}

impl DuplexMode {
    pub fn of(kind: SchedulerKind) -> Self {
        if kind.is_full_duplex() {
            DuplexMode::FullDuplex
        } else {
            DuplexMode::HalfDuplex
        }
    }

    /// Bandwidth carrying one direction's link.
    pub fn link_bandwidth_hz(self, total_hz: f64) -> f64 {
        match self {
            DuplexMode::FullDuplex => total_hz,
            DuplexMode::HalfDuplex => total_hz / 2.0,
        }
    }
}

/// Shannon rate over a bandwidth, with an optional spectral-efficiency cap.
pub fn rate_bps(sinr: f64, bandwidth_hz: f64, cap_bps_per_hz: Option<f64>) -> f64 {
    debug_assert!(sinr >= 0.0);
    let mut se = sinr.ln_1p() / std::f64::consts::LN_2;
    if let Some(cap) = cap_bps_per_hz {
        se = se.min(cap);
    }
    bandwidth_hz * se
}

/// Additive terms of a DL receiver's SINR denominator, in linear mW.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DlBreakdown {
    pub signal_mw: f64,
    pub intra_cell_u2d_mw: f64,
    pub inter_cell_u2d_mw: f64,
    pub inter_cell_b2d_mw: f64,
    pub noise_mw: f64,
}

impl DlBreakdown {
    pub fn denominator_mw(&self) -> f64 {
        self.intra_cell_u2d_mw + self.inter_cell_u2d_mw + self.inter_cell_b2d_mw + self.noise_mw
    }

    pub fn sinr(&self) -> f64 {
        self.signal_mw / self.denominator_mw()
    }
}

/// Additive terms of an UL receiver's SINR denominator, in linear mW.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UlBreakdown {
    pub signal_mw: f64,
    pub residual_self_mw: f64,
    pub inter_cell_b2b_mw: f64,
    pub inter_cell_u2b_mw: f64,
    pub noise_mw: f64,
}

impl UlBreakdown {
    pub fn denominator_mw(&self) -> f64 {
        self.residual_self_mw + self.inter_cell_b2b_mw + self.inter_cell_u2b_mw + self.noise_mw
    }

    pub fn sinr(&self) -> f64 {
        self.signal_mw / self.denominator_mw()
    }
}

/// SINR and breakdown for cell `c`'s DL receiver this TTI, or `None` when
/// the cell has no active DL link.
pub fn compute_dl_sinr(
    c: usize,
    decisions: &[SchedulingDecision],
    layout: &NetworkLayout,
    gains: &GainMatrix,
    noise_mw: f64,
    mode: DuplexMode,
) -> Option<(f64, DlBreakdown)> {
    let d = &decisions[c];
    let dl_ue = d.dl_ue?;
    if d.p_bs_mw <= 0.0 {
        return None;
    }
    let rx = layout.ue_node(dl_ue);
    let mut b = DlBreakdown {
        signal_mw: gains.gain(layout.pico_node(c), rx) * d.p_bs_mw,
        noise_mw,
        ..DlBreakdown::default()
    };
    if mode == DuplexMode::FullDuplex {
        if let Some(ul) = d.ul_ue {
            if d.p_ue_mw > 0.0 {
                b.intra_cell_u2d_mw = gains.gain(layout.ue_node(ul), rx) * d.p_ue_mw;
            }
        }
    }
    for (other, od) in decisions.iter().enumerate() {
        if other == c {
            continue;
        }
        if od.dl_ue.is_some() && od.p_bs_mw > 0.0 {
            b.inter_cell_b2d_mw += gains.gain(layout.pico_node(other), rx) * od.p_bs_mw;
        }
        if mode == DuplexMode::FullDuplex {
            if let Some(ul) = od.ul_ue {
                if od.p_ue_mw > 0.0 {
                    b.inter_cell_u2d_mw += gains.gain(layout.ue_node(ul), rx) * od.p_ue_mw;
                }
            }
        }
    }
    Some((b.sinr(), b))
}

/// SINR and breakdown at cell `c`'s pico for its UL link this TTI, or
/// `None` when the cell has no active UL link. The residual
/// self-interference term appears only in full duplex while the cell's own
/// DL is transmitting.
pub fn compute_ul_sinr(
    c: usize,
    decisions: &[SchedulingDecision],
    layout: &NetworkLayout,
    gains: &GainMatrix,
    noise_mw: f64,
    sic: &SicModel,
    mode: DuplexMode,
) -> Option<(f64, UlBreakdown)> {
    let d = &decisions[c];
    let ul_ue = d.ul_ue?;
    if d.p_ue_mw <= 0.0 {
        return None;
    }
    let rx = layout.pico_node(c);
    let mut b = UlBreakdown {
        signal_mw: gains.gain(layout.ue_node(ul_ue), rx) * d.p_ue_mw,
        noise_mw,
        ..UlBreakdown::default()
    };
    if mode == DuplexMode::FullDuplex && d.dl_ue.is_some() && d.p_bs_mw > 0.0 {
        b.residual_self_mw = sic.residual_power_mw(d.p_bs_mw);
    }
    for (other, od) in decisions.iter().enumerate() {
        if other == c {
            continue;
        }
        if mode == DuplexMode::FullDuplex && od.dl_ue.is_some() && od.p_bs_mw > 0.0 {
            b.inter_cell_b2b_mw += gains.gain(layout.pico_node(other), rx) * od.p_bs_mw;
        }
        if let Some(ul) = od.ul_ue {
            if od.p_ue_mw > 0.0 {
                b.inter_cell_u2b_mw += gains.gain(layout.ue_node(ul), rx) * od.p_ue_mw;
            }
        }
    }
    Some((b.sinr(), b))
}

/// Drop-level accumulators of Eq. style totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub t_tot_ul_bits: f64,
    pub t_tot_dl_bits: f64,
    pub e_tot_ul_j: f64,
    pub e_tot_dl_j: f64,
    pub p_tot_ul_w: f64,
    pub p_tot_dl_w: f64,
    pub b_tot_hz: f64,
    pub duration_s: f64,
    pub se_bps_per_hz: f64,
    pub ee_bits_per_j: f64,
}

impl Metrics {
    fn from_totals(
        t_ul_bits: f64,
        t_dl_bits: f64,
        e_ul_mj: f64,
        e_dl_mj: f64,
        b_tot_hz: f64,
        duration_s: f64,
    ) -> Self {
        let e_ul_j = e_ul_mj / 1000.0;
        let e_dl_j = e_dl_mj / 1000.0;
        let throughput = t_ul_bits + t_dl_bits;
        let energy = e_ul_j + e_dl_j;
        Self {
            t_tot_ul_bits: t_ul_bits,
            t_tot_dl_bits: t_dl_bits,
            e_tot_ul_j: e_ul_j,
            e_tot_dl_j: e_dl_j,
            p_tot_ul_w: e_ul_j / duration_s,
            p_tot_dl_w: e_dl_j / duration_s,
            b_tot_hz,
            duration_s,
            se_bps_per_hz: throughput / (duration_s * b_tot_hz),
            ee_bits_per_j: if energy > 0.0 { throughput / energy } else { 0.0 },
        }
    }
}

/// Running sums of the interference categories over all receiver-TTI
/// samples of a drop (or merged across drops).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InterferenceStats {
    pub dl_samples: u64,
    pub ul_samples: u64,
    pub sum_intra_cell_u2d_mw: f64,
    pub sum_inter_cell_u2d_mw: f64,
    pub sum_inter_cell_b2d_mw: f64,
    pub sum_dl_noise_mw: f64,
    pub sum_residual_self_mw: f64,
    pub sum_inter_cell_b2b_mw: f64,
    pub sum_inter_cell_u2b_mw: f64,
    pub sum_ul_noise_mw: f64,
}

impl InterferenceStats {
    fn add_dl(&mut self, b: &DlBreakdown) {
        self.dl_samples += 1;
        self.sum_intra_cell_u2d_mw += b.intra_cell_u2d_mw;
        self.sum_inter_cell_u2d_mw += b.inter_cell_u2d_mw;
        self.sum_inter_cell_b2d_mw += b.inter_cell_b2d_mw;
        self.sum_dl_noise_mw += b.noise_mw;
    }

    fn add_ul(&mut self, b: &UlBreakdown) {
        self.ul_samples += 1;
        self.sum_residual_self_mw += b.residual_self_mw;
        self.sum_inter_cell_b2b_mw += b.inter_cell_b2b_mw;
        self.sum_inter_cell_u2b_mw += b.inter_cell_u2b_mw;
        self.sum_ul_noise_mw += b.noise_mw;
    }

    pub fn merge(&mut self, other: &InterferenceStats) {
        self.dl_samples += other.dl_samples;
        self.ul_samples += other.ul_samples;
        self.sum_intra_cell_u2d_mw += other.sum_intra_cell_u2d_mw;
        self.sum_inter_cell_u2d_mw += other.sum_inter_cell_u2d_mw;
        self.sum_inter_cell_b2d_mw += other.sum_inter_cell_b2d_mw;
        self.sum_dl_noise_mw += other.sum_dl_noise_mw;
        self.sum_residual_self_mw += other.sum_residual_self_mw;
        self.sum_inter_cell_b2b_mw += other.sum_inter_cell_b2b_mw;
        self.sum_inter_cell_u2b_mw += other.sum_inter_cell_u2b_mw;
        self.sum_ul_noise_mw += other.sum_ul_noise_mw;
    }

    fn dl_mean(&self, sum: f64) -> f64 {
        if self.dl_samples == 0 {
            f64::NAN
        } else {
            sum / self.dl_samples as f64
        }
    }

    fn ul_mean(&self, sum: f64) -> f64 {
        if self.ul_samples == 0 {
            f64::NAN
        } else {
            sum / self.ul_samples as f64
        }
    }

    pub fn mean_intra_cell_u2d_mw(&self) -> f64 {
        self.dl_mean(self.sum_intra_cell_u2d_mw)
    }

    pub fn mean_inter_cell_u2d_mw(&self) -> f64 {
        self.dl_mean(self.sum_inter_cell_u2d_mw)
    }

    pub fn mean_inter_cell_b2d_mw(&self) -> f64 {
        self.dl_mean(self.sum_inter_cell_b2d_mw)
    }

    pub fn mean_residual_self_mw(&self) -> f64 {
        self.ul_mean(self.sum_residual_self_mw)
    }

    pub fn mean_inter_cell_b2b_mw(&self) -> f64 {
        self.ul_mean(self.sum_inter_cell_b2b_mw)
    }

    pub fn mean_inter_cell_u2b_mw(&self) -> f64 {
        self.ul_mean(self.sum_inter_cell_u2b_mw)
    }

    /// `(direction, category, mean_mw)` rows for export, in a fixed order.
    pub fn category_means(&self) -> Vec<(&'static str, &'static str, f64)> {
        vec![
            ("dl", "intra_cell_u2d", self.mean_intra_cell_u2d_mw()),
            ("dl", "inter_cell_u2d", self.mean_inter_cell_u2d_mw()),
            ("dl", "inter_cell_b2d", self.mean_inter_cell_b2d_mw()),
            ("dl", "noise", self.dl_mean(self.sum_dl_noise_mw)),
            ("ul", "residual_self", self.mean_residual_self_mw()),
            ("ul", "inter_cell_b2b", self.mean_inter_cell_b2b_mw()),
            ("ul", "inter_cell_u2b", self.mean_inter_cell_u2b_mw()),
            ("ul", "noise", self.ul_mean(self.sum_ul_noise_mw)),
        ]
    }
}

/// One scheduling decision row for the debug trace CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub tti: u32,
    pub cell: usize,
    pub ul_ue: Option<usize>,
    pub dl_ue: Option<usize>,
    pub p_bs_dbm: f64,
    pub p_ue_dbm: f64,
}

/// Writes trace rows as `tti,cell,ul_ue,dl_ue,p_bs_dbm,p_ue_dbm`; muted
/// powers render as `-inf` dBm and unscheduled UEs as empty fields.
pub fn write_trace_csv<W: std::io::Write>(rows: &[TraceRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["tti", "cell", "ul_ue", "dl_ue", "p_bs_dbm", "p_ue_dbm"])?;
    for r in rows {
        wtr.write_record([
            r.tti.to_string(),
            r.cell.to_string(),
            r.ul_ue.map(|u| u.to_string()).unwrap_or_default(),
            r.dl_ue.map(|u| u.to_string()).unwrap_or_default(),
            r.p_bs_dbm.to_string(),
            r.p_ue_dbm.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-TTI interference samples of one drop for CDF plotting, one row per
/// receiver and category. Zero components render as `-inf` dBm.
pub fn write_breakdown_samples_csv<W: std::io::Write>(
    outcome: &DropOutcome,
    w: W,
) -> Result<()> {
    let dbm = |mw: f64| {
        if mw > 0.0 {
            (10.0 * mw.log10()).to_string()
        } else {
            f64::NEG_INFINITY.to_string()
        }
    };
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["direction", "category", "power_dbm"])?;
    for b in &outcome.dl_breakdowns {
        wtr.write_record(["dl", "intra_cell_u2d", &dbm(b.intra_cell_u2d_mw)])?;
        wtr.write_record(["dl", "inter_cell_u2d", &dbm(b.inter_cell_u2d_mw)])?;
        wtr.write_record(["dl", "inter_cell_b2d", &dbm(b.inter_cell_b2d_mw)])?;
        wtr.write_record(["dl", "noise", &dbm(b.noise_mw)])?;
    }
    for b in &outcome.ul_breakdowns {
        wtr.write_record(["ul", "residual_self", &dbm(b.residual_self_mw)])?;
        wtr.write_record(["ul", "inter_cell_b2b", &dbm(b.inter_cell_b2b_mw)])?;
        wtr.write_record(["ul", "inter_cell_u2b", &dbm(b.inter_cell_u2b_mw)])?;
        wtr.write_record(["ul", "noise", &dbm(b.noise_mw)])?;
    }
    wtr.flush()?;
    Ok(())
}

/// What a drop run should retain beyond the aggregate statistics.
#[derive(Debug, Clone, Copy, Default)]
pub struct DropOptions {
    /// Keep every receiver-TTI breakdown (memory-heavy; tests and CDF export).
    pub record_breakdowns: bool,
    /// Keep the per-TTI scheduling trace.
    pub record_trace: bool,
}

/// Everything produced by one drop.
#[derive(Debug, Clone)]
pub struct DropOutcome {
    pub metrics: Metrics,
    pub stats: InterferenceStats,
    pub dl_breakdowns: Vec<DlBreakdown>,
    pub ul_breakdowns: Vec<UlBreakdown>,
    pub trace: Vec<TraceRow>,
}

/// A fully realized drop: node placement, roles, association, and the
/// long-term gain matrix.
#[derive(Debug, Clone)]
pub struct DropRealization {
    pub layout: NetworkLayout,
    pub gains: GainMatrix,
}

/// Places picos and UEs, draws shadowing, associates UEs, and designates
/// UL/DL roles for drop `drop_index` of the campaign seeded by
/// `cfg.run.seed`. Deterministic per `(seed, drop_index)`.
pub fn realize_drop(cfg: &SimConfig, drop_index: u32) -> Result<DropRealization> {
    let drop_seed = crate::rng::derive_seed(cfg.run.seed, u64::from(drop_index));
    let macros = generate_macro_layout(&cfg.scenario)?;
    let mut placement_rng = seeded_rng(drop_seed, stream::PLACEMENT);
    let picos = drop_picos(&cfg.scenario, &macros, &mut placement_rng)?;
    let placements = drop_ues(&cfg.scenario, &macros, &picos, &mut placement_rng)?;
    let ue_positions: Vec<_> = placements.iter().map(|p| p.position).collect();

    let mut shadowing_rng = seeded_rng(drop_seed, stream::SHADOWING);
    let gains = GainMatrix::build(&macros, &picos, &ue_positions, &cfg.channel, &mut shadowing_rng);

    let association = associate_ues(
        &cfg.scenario,
        &cfg.power,
        &placements,
        macros.len(),
        picos.len(),
        &gains,
    );
    let mut roles_rng = seeded_rng(drop_seed, stream::ROLES);
    let ue_roles = designate_roles(&association, macros.len(), picos.len(), &mut roles_rng);

    Ok(DropRealization {
        layout: NetworkLayout {
            macro_positions: macros,
            pico_positions: picos,
            ue_positions,
            ue_roles,
            association,
        },
        gains,
    })
}

/// Interference-blind per-cell candidate lists with own-link SNR rate
/// estimates at the mode's link bandwidth. Constant across the TTIs of a
/// drop (long-term gains only).
fn build_candidates(
    layout: &NetworkLayout,
    gains: &GainMatrix,
    cfg: &SimConfig,
    mode: DuplexMode,
) -> Vec<CellCandidates> {
    let noise = cfg.channel.noise();
    let band = mode.link_bandwidth_hz(cfg.duplex.bandwidth_hz);
    // SINR is referenced to the full band in both duplex modes.
    let ue_noise = noise.power_mw(NodeRole::DownlinkUe, cfg.duplex.bandwidth_hz);
    let pico_noise = noise.power_mw(NodeRole::PicoBs, cfg.duplex.bandwidth_hz);
    let cap = cfg.run.rate_cap_bps_per_hz;
    let mut cells = vec![CellCandidates::default(); layout.num_picos()];
    // Ascending UE order keeps tie-breaks on the lowest index.
    for ue in 0..layout.num_ues() {
        let ServingCell::Pico(cell) = layout.association[ue] else {
            continue;
        };
        let g = gains.gain(layout.ue_node(ue), layout.pico_node(cell));
        match layout.ue_roles[ue] {
            NodeRole::UplinkUe => cells[cell].ul.push(Candidate {
                ue,
                est_rate_bps: rate_bps(g * cfg.power.ue_tx_mw() / pico_noise, band, cap),
            }),
            NodeRole::DownlinkUe => cells[cell].dl.push(Candidate {
                ue,
                est_rate_bps: rate_bps(g * cfg.power.pico_tx_mw() / ue_noise, band, cap),
            }),
            NodeRole::MacroBs | NodeRole::PicoBs => unreachable!("UE roles only"),
        }
    }
    cells
}

/// Runs the TTI loop for one realized drop under one scheduler.
pub fn run_drop(
    cfg: &SimConfig,
    drop: &DropRealization,
    scheduler: SchedulerKind,
    opts: &DropOptions,
) -> Result<DropOutcome> {
    if cfg.run.ttis == 0 {
        return Err(Error::Config("cannot run a drop of zero TTIs".into()));
    }
    let layout = &drop.layout;
    let gains = &drop.gains;
    let mode = DuplexMode::of(scheduler);
    let sic = cfg.duplex.sic()?;
    let noise = cfg.channel.noise();
    let band = mode.link_bandwidth_hz(cfg.duplex.bandwidth_hz);
    // Full-band noise in both modes; HD halves only the rate bandwidth.
    let ue_noise = noise.power_mw(NodeRole::DownlinkUe, cfg.duplex.bandwidth_hz);
    let pico_noise = noise.power_mw(NodeRole::PicoBs, cfg.duplex.bandwidth_hz);
    let cap = cfg.run.rate_cap_bps_per_hz;
    let tti_s = cfg.run.tti_duration_s;
    // PC's intra-cell context uses the DL receiver's noise level.
    let pc_n0 = ue_noise;

    let candidates = build_candidates(layout, gains, cfg, mode);
    let mut state = PfState::new(layout.num_ues(), layout.num_picos(), &cfg.pf);

    let mut t_ul_bits = 0.0;
    let mut t_dl_bits = 0.0;
    let mut e_ul_mj = 0.0;
    let mut e_dl_mj = 0.0;
    let mut stats = InterferenceStats::default();
    let mut dl_breakdowns = Vec::new();
    let mut ul_breakdowns = Vec::new();
    let mut trace = Vec::new();
    let mut decisions = Vec::with_capacity(layout.num_picos());
    let mut served: Vec<(usize, f64)> = Vec::with_capacity(2 * layout.num_picos());

    for tti in 0..cfg.run.ttis {
        decisions.clear();
        for cell in 0..layout.num_picos() {
            let cands = &candidates[cell];
            let mut decision = match scheduler {
                SchedulerKind::HdPf => schedule_hd(cell, cands, &state, &cfg.power),
                SchedulerKind::FdPf | SchedulerKind::FdPfPc => {
                    schedule_fd_pf(cell, cands, &state, &cfg.power)
                }
                SchedulerKind::FdUp | SchedulerKind::FdUpPc => {
                    schedule_fd_up(cell, cands, &state, &cfg.power, &layout.ue_positions)
                }
            };
            if scheduler.uses_power_control() {
                if let (Some(ul), Some(dl)) = (decision.ul_ue, decision.dl_ue) {
                    let pico = layout.pico_node(cell);
                    let ctx = PairContext {
                        alpha_b2d: gains.gain(pico, layout.ue_node(dl)),
                        alpha_u2d: gains.gain(layout.ue_node(ul), layout.ue_node(dl)),
                        alpha_u2b: gains.gain(layout.ue_node(ul), pico),
                        alpha_sic: sic.residual_coefficient(),
                        n0_mw: pc_n0,
                        p_bs_max_mw: cfg.power.pico_tx_mw(),
                        p_ue_max_mw: cfg.power.ue_tx_mw(),
                    };
                    decision = apply_binary_pc(decision, &ctx)?;
                }
            }
            decisions.push(decision);
        }

        served.clear();
        for cell in 0..layout.num_picos() {
            if let Some((sinr, b)) =
                compute_dl_sinr(cell, &decisions, layout, gains, ue_noise, mode)
            {
                let rate = rate_bps(sinr, band, cap);
                t_dl_bits += rate * tti_s;
                served.push((decisions[cell].dl_ue.expect("active DL"), rate));
                stats.add_dl(&b);
                if opts.record_breakdowns {
                    dl_breakdowns.push(b);
                }
            }
            if let Some((sinr, b)) =
                compute_ul_sinr(cell, &decisions, layout, gains, pico_noise, &sic, mode)
            {
                let rate = rate_bps(sinr, band, cap);
                t_ul_bits += rate * tti_s;
                served.push((decisions[cell].ul_ue.expect("active UL"), rate));
                stats.add_ul(&b);
                if opts.record_breakdowns {
                    ul_breakdowns.push(b);
                }
            }
            e_dl_mj += decisions[cell].p_bs_mw * tti_s;
            e_ul_mj += decisions[cell].p_ue_mw * tti_s;
            if opts.record_trace {
                let d = &decisions[cell];
                trace.push(TraceRow {
                    tti,
                    cell,
                    ul_ue: d.ul_ue,
                    dl_ue: d.dl_ue,
                    p_bs_dbm: if d.p_bs_mw > 0.0 { mw_to_dbm(d.p_bs_mw) } else { f64::NEG_INFINITY },
                    p_ue_dbm: if d.p_ue_mw > 0.0 { mw_to_dbm(d.p_ue_mw) } else { f64::NEG_INFINITY },
                });
            }
        }
        state.pf_update(&served);
        state.advance_turns(&decisions);
    }

    let duration_s = f64::from(cfg.run.ttis) * tti_s;
    Ok(DropOutcome {
        metrics: Metrics::from_totals(
            t_ul_bits,
            t_dl_bits,
            e_ul_mj,
            e_dl_mj,
            cfg.duplex.bandwidth_hz,
            duration_s,
        ),
        stats,
        dl_breakdowns,
        ul_breakdowns,
        trace,
    })
}

/// Per-drop summary retained by a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropSummary {
    pub drop_index: u32,
    pub se_bps_per_hz: f64,
    pub ee_bits_per_j: f64,
    pub stats: InterferenceStats,
}

/// Aggregated results of `drops` independent drops under one scheduler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub scheduler: SchedulerKind,
    pub drops: Vec<DropSummary>,
    pub se_mean: f64,
    pub se_std: f64,
    pub ee_mean: f64,
    pub ee_std: f64,
    /// Category sums merged over every receiver-TTI sample of all drops.
    pub stats: InterferenceStats,
}

fn mean_and_std(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Realizes and runs `cfg.run.drops` independent drops in parallel and
/// aggregates them in drop order, so results are bit-identical for a fixed
/// `(config, seed, scheduler)` regardless of worker count.
pub fn run_campaign(cfg: &SimConfig, scheduler: SchedulerKind) -> Result<CampaignResult> {
    cfg.validate()?;
    let outcomes: Vec<(u32, Metrics, InterferenceStats)> = (0..cfg.run.drops)
        .into_par_iter()
        .map(|i| {
            let drop = realize_drop(cfg, i)?;
            let outcome = run_drop(cfg, &drop, scheduler, &DropOptions::default())?;
            Ok((i, outcome.metrics, outcome.stats))
        })
        .collect::<Result<_>>()?;

    let drops: Vec<DropSummary> = outcomes
        .iter()
        .map(|(i, m, s)| DropSummary {
            drop_index: *i,
            se_bps_per_hz: m.se_bps_per_hz,
            ee_bits_per_j: m.ee_bits_per_j,
            stats: *s,
        })
        .collect();
    let (se_mean, se_std) = mean_and_std(drops.iter().map(|d| d.se_bps_per_hz));
    let (ee_mean, ee_std) = mean_and_std(drops.iter().map(|d| d.ee_bits_per_j));
    let mut stats = InterferenceStats::default();
    for d in &drops {
        stats.merge(&d.stats);
    }
    Ok(CampaignResult {
        scheduler,
        drops,
        se_mean,
        se_std,
        ee_mean,
        ee_std,
        stats,
    })
}
