//! Experiment orchestration: scheduler comparisons, the SIC and pico
//! density sweeps, the single-cell studies, the optimal-power map, and all
//! plot-ready CSV / manifest exports.
//!
//! Every study pairs schedulers on identical drops (the drop realization
//! depends only on the seed and drop index), so reported gains compare the
//! same layouts under different strategies. Gains are percentages of the
//! half-duplex PF mean, with across-drop standard errors from the paired
//! per-drop differences.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{link_gain, GainMatrix, LinkClass};
use crate::config::SimConfig;
use crate::engine::{
    realize_drop, run_campaign, run_drop, CampaignResult, DropOptions, DropRealization,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded_rng, stream};
use crate::scheduling::SchedulerKind;
use crate::sumrate::{
    binary_power_control, exhaustive_search_oracle, se_ee_curve, PairContext, SolutionMode,
};
use crate::topology::{
    designate_roles, sample_in_annulus, NetworkLayout, NodeRole, Position, ServingCell,
};

/// dBm of a possibly-zero linear power; zero renders as `-inf`.
fn power_dbm(mw: f64) -> f64 {
    if mw > 0.0 {
        10.0 * mw.log10()
    } else {
        f64::NEG_INFINITY
    }
}

/// `n` evenly spaced values covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// One summary row of a study, keyed by the full parameter tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario: String,
    pub scheduler: SchedulerKind,
    pub sic_db: f64,
    pub picos_per_macro: usize,
    pub total_ues: usize,
    pub drops: u32,
    pub ttis: u32,
    pub se_mean: f64,
    pub se_std: f64,
    pub ee_mean: f64,
    pub ee_std: f64,
    /// Percent gain of the SE mean over the half-duplex PF row of the same
    /// key; 0 for the baseline itself.
    pub se_gain_pct: f64,
    pub se_gain_stderr_pct: f64,
    pub ee_gain_pct: f64,
    pub ee_gain_stderr_pct: f64,
}

/// Rows of one or more studies, one row per parameter key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn find(
        &self,
        scheduler: SchedulerKind,
        sic_db: f64,
        picos_per_macro: usize,
    ) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.scheduler == scheduler && r.sic_db == sic_db && r.picos_per_macro == picos_per_macro)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "scenario",
            "scheduler",
            "sic_db",
            "picos_per_macro",
            "total_ues",
            "drops",
            "ttis",
            "se_mean",
            "se_std",
            "ee_mean",
            "ee_std",
            "se_gain_pct",
            "se_gain_stderr_pct",
            "ee_gain_pct",
            "ee_gain_stderr_pct",
        ])?;
        for r in &self.rows {
            wtr.write_record([
                r.scenario.clone(),
                r.scheduler.to_string(),
                r.sic_db.to_string(),
                r.picos_per_macro.to_string(),
                r.total_ues.to_string(),
                r.drops.to_string(),
                r.ttis.to_string(),
                r.se_mean.to_string(),
                r.se_std.to_string(),
                r.ee_mean.to_string(),
                r.ee_std.to_string(),
                r.se_gain_pct.to_string(),
                r.se_gain_stderr_pct.to_string(),
                r.ee_gain_pct.to_string(),
                r.ee_gain_stderr_pct.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Percent gain of the mean over the baseline mean, with the standard
/// error of the mean paired per-drop difference. Series must be paired by
/// drop index.
pub fn gain_with_stderr(values: &[f64], baseline: &[f64]) -> (f64, f64) {
    assert_eq!(values.len(), baseline.len(), "series must be drop-paired");
    let n = values.len() as f64;
    let mu_base = baseline.iter().sum::<f64>() / n;
    let mu = values.iter().sum::<f64>() / n;
    let gain_pct = (mu / mu_base - 1.0) * 100.0;
    if values.len() < 2 {
        return (gain_pct, 0.0);
    }
    let diffs: Vec<f64> = values
        .iter()
        .zip(baseline)
        .map(|(v, b)| (v - b) / mu_base)
        .collect();
    let mean_d = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean_d) * (d - mean_d)).sum::<f64>() / (n - 1.0);
    (gain_pct, (var / n).sqrt() * 100.0)
}

/// The baseline first, then the plan's schedulers in order, deduplicated.
fn schedulers_with_baseline(plan: &[SchedulerKind]) -> Vec<SchedulerKind> {
    let mut out = vec![SchedulerKind::HdPf];
    for &s in plan {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn scenario_label(cfg: &SimConfig) -> String {
    cfg.scenario.ue_distribution.as_str().to_string()
}

/// Per-scheduler drop series of one study key, used to assemble rows.
struct KeyedCampaign {
    scheduler: SchedulerKind,
    se: Vec<f64>,
    ee: Vec<f64>,
}

fn rows_for_key(
    scenario: &str,
    sic_db: f64,
    picos_per_macro: usize,
    total_ues: usize,
    drops: u32,
    ttis: u32,
    campaigns: &[KeyedCampaign],
) -> Vec<ResultRow> {
    let baseline = campaigns
        .iter()
        .find(|c| c.scheduler == SchedulerKind::HdPf)
        .expect("baseline scheduler present");
    campaigns
        .iter()
        .map(|c| {
            let (se_mean, se_std) = mean_std(&c.se);
            let (ee_mean, ee_std) = mean_std(&c.ee);
            let (se_gain_pct, se_gain_stderr_pct) = gain_with_stderr(&c.se, &baseline.se);
            let (ee_gain_pct, ee_gain_stderr_pct) = gain_with_stderr(&c.ee, &baseline.ee);
            ResultRow {
                scenario: scenario.to_string(),
                scheduler: c.scheduler,
                sic_db,
                picos_per_macro,
                total_ues,
                drops,
                ttis,
                se_mean,
                se_std,
                ee_mean,
                ee_std,
                se_gain_pct,
                se_gain_stderr_pct,
                ee_gain_pct,
                ee_gain_stderr_pct,
            }
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn keyed(c: &CampaignResult) -> KeyedCampaign {
    KeyedCampaign {
        scheduler: c.scheduler,
        se: c.drops.iter().map(|d| d.se_bps_per_hz).collect(),
        ee: c.drops.iter().map(|d| d.ee_bits_per_j).collect(),
    }
}

fn run_keyed_campaign(cfg: &SimConfig, scheduler: SchedulerKind, key: &str) -> Result<CampaignResult> {
    run_campaign(cfg, scheduler)
        .map_err(|e| Error::Domain(format!("campaign {key}/{scheduler} failed: {e}")))
}

/// Runs every planned scheduler on the configured scenario and reports
/// SE/EE with gains over the half-duplex PF baseline.
pub fn run_comparison(cfg: &SimConfig) -> Result<(ResultTable, Vec<CampaignResult>)> {
    cfg.validate()?;
    let scenario = scenario_label(cfg);
    let schedulers = schedulers_with_baseline(&cfg.plan.schedulers);
    let mut campaigns = Vec::with_capacity(schedulers.len());
    for s in schedulers {
        campaigns.push(run_keyed_campaign(cfg, s, &scenario)?);
    }
    let keyed_campaigns: Vec<KeyedCampaign> = campaigns.iter().map(keyed).collect();
    let table = ResultTable {
        rows: rows_for_key(
            &scenario,
            cfg.duplex.sic_db,
            cfg.scenario.picos_per_macro,
            cfg.scenario.num_ues(),
            cfg.run.drops,
            cfg.run.ttis,
            &keyed_campaigns,
        ),
    };
    Ok((table, campaigns))
}

/// Smallest swept SIC level at which a scheduler's SE gain turns positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SicCrossing {
    pub scheduler: SchedulerKind,
    pub crossing_sic_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicSweep {
    pub table: ResultTable,
    pub crossings: Vec<SicCrossing>,
}

/// Sweeps the SIC capability. The half-duplex baseline never touches the
/// SIC model, so it is run once and re-keyed per level; full-duplex
/// schedulers rerun at every level against the same drops.
pub fn run_sic_sweep(cfg: &SimConfig) -> Result<SicSweep> {
    cfg.validate()?;
    let scenario = scenario_label(cfg);
    let mut levels = cfg.plan.sic_levels_db.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let fd_schedulers: Vec<SchedulerKind> = schedulers_with_baseline(&cfg.plan.schedulers)
        .into_iter()
        .filter(|s| *s != SchedulerKind::HdPf)
        .collect();

    let baseline = keyed(&run_keyed_campaign(cfg, SchedulerKind::HdPf, &scenario)?);
    let mut rows = Vec::new();
    let mut gains: Vec<Vec<f64>> = vec![Vec::new(); fd_schedulers.len()];
    for &sic_db in &levels {
        let mut level_cfg = cfg.clone();
        level_cfg.duplex.sic_db = sic_db;
        let key = format!("{scenario}/sic{sic_db}");
        let mut campaigns = vec![KeyedCampaign {
            scheduler: SchedulerKind::HdPf,
            se: baseline.se.clone(),
            ee: baseline.ee.clone(),
        }];
        for (i, &s) in fd_schedulers.iter().enumerate() {
            let c = run_keyed_campaign(&level_cfg, s, &key)?;
            campaigns.push(keyed(&c));
            let (gain, _) = gain_with_stderr(&campaigns.last().unwrap().se, &baseline.se);
            gains[i].push(gain);
        }
        rows.extend(rows_for_key(
            &scenario,
            sic_db,
            cfg.scenario.picos_per_macro,
            cfg.scenario.num_ues(),
            cfg.run.drops,
            cfg.run.ttis,
            &campaigns,
        ));
    }

    let crossings = fd_schedulers
        .iter()
        .enumerate()
        .map(|(i, &scheduler)| SicCrossing {
            scheduler,
            crossing_sic_db: levels
                .iter()
                .zip(&gains[i])
                .find(|(_, &g)| g > 0.0)
                .map(|(&sic, _)| sic),
        })
        .collect();
    Ok(SicSweep {
        table: ResultTable { rows },
        crossings,
    })
}

/// Sweeps the pico density, rerunning every scheduler (baseline included)
/// at each density.
pub fn run_density_sweep(cfg: &SimConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let scenario = scenario_label(cfg);
    let mut densities = cfg.plan.pico_densities.clone();
    densities.sort_unstable();
    densities.dedup();
    let schedulers = schedulers_with_baseline(&cfg.plan.schedulers);
    let mut rows = Vec::new();
    for &density in &densities {
        let mut density_cfg = cfg.clone();
        density_cfg.scenario.picos_per_macro = density as usize;
        let key = format!("{scenario}/picos{density}");
        let mut campaigns = Vec::with_capacity(schedulers.len());
        for &s in &schedulers {
            campaigns.push(keyed(&run_keyed_campaign(&density_cfg, s, &key)?));
        }
        rows.extend(rows_for_key(
            &scenario,
            cfg.duplex.sic_db,
            density as usize,
            density_cfg.scenario.num_ues(),
            cfg.run.drops,
            cfg.run.ttis,
            &campaigns,
        ));
    }
    Ok(ResultTable { rows })
}

/// One pico at the origin with `ues_per_pico` UEs dropped uniformly in the
/// annulus between the minimum pico-UE distance and the single-cell study
/// radius. Deterministic per `(seed, drop_index)` like the multi-cell
/// drops.
pub fn realize_single_cell_drop(cfg: &SimConfig, drop_index: u32) -> Result<DropRealization> {
    let n = cfg.scenario.ues_per_pico;
    if n < 2 {
        return Err(Error::Config(format!(
            "the single-cell study needs at least 2 UEs per pico, got {n}"
        )));
    }
    let drop_seed = derive_seed(cfg.run.seed, u64::from(drop_index));
    let pico = Position::new(0.0, 0.0);
    let mut placement_rng = seeded_rng(drop_seed, stream::PLACEMENT);
    let ue_positions: Vec<Position> = (0..n)
        .map(|_| {
            sample_in_annulus(
                pico,
                cfg.scenario.pico_ue_min_dist_m,
                cfg.scenario.singlecell_radius_m,
                &mut placement_rng,
            )
        })
        .collect();
    let mut shadowing_rng = seeded_rng(drop_seed, stream::SHADOWING);
    let gains = GainMatrix::build(&[], &[pico], &ue_positions, &cfg.channel, &mut shadowing_rng);
    let association = vec![ServingCell::Pico(0); n];
    let mut roles_rng = seeded_rng(drop_seed, stream::ROLES);
    let ue_roles = designate_roles(&association, 0, 1, &mut roles_rng);
    Ok(DropRealization {
        layout: NetworkLayout {
            macro_positions: vec![],
            pico_positions: vec![pico],
            ue_positions,
            ue_roles,
            association,
        },
        gains,
    })
}

/// Single-cell random-drop study: every planned scheduler over the same
/// 4-UE (by default) drops, reported against the half-duplex baseline.
pub fn run_singlecell_study(cfg: &SimConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let schedulers = schedulers_with_baseline(&cfg.plan.schedulers);
    let per_drop: Vec<Vec<(f64, f64)>> = (0..cfg.run.drops)
        .into_par_iter()
        .map(|i| {
            let drop = realize_single_cell_drop(cfg, i)?;
            schedulers
                .iter()
                .map(|&s| {
                    let out = run_drop(cfg, &drop, s, &DropOptions::default())?;
                    Ok((out.metrics.se_bps_per_hz, out.metrics.ee_bits_per_j))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let campaigns: Vec<KeyedCampaign> = schedulers
        .iter()
        .enumerate()
        .map(|(s_idx, &scheduler)| KeyedCampaign {
            scheduler,
            se: per_drop.iter().map(|d| d[s_idx].0).collect(),
            ee: per_drop.iter().map(|d| d[s_idx].1).collect(),
        })
        .collect();
    Ok(ResultTable {
        rows: rows_for_key(
            "singlecell",
            cfg.duplex.sic_db,
            1,
            cfg.scenario.ues_per_pico,
            cfg.run.drops,
            cfg.run.ttis,
            &campaigns,
        ),
    })
}

/// Shadowing-free pair context for a BS at the origin, an UL UE at
/// `ul_pos` and a DL UE at `dl_pos`.
pub fn pair_context_for_geometry(
    cfg: &SimConfig,
    ul_pos: Position,
    dl_pos: Position,
) -> Result<PairContext> {
    let bs = Position::new(0.0, 0.0);
    let gain_of = |class: LinkClass, d: f64| link_gain(cfg.channel.pathloss_db(class, d), 0.0);
    Ok(PairContext {
        alpha_b2d: gain_of(LinkClass::PicoToUe, bs.distance(dl_pos)),
        alpha_u2d: gain_of(LinkClass::UeToUe, ul_pos.distance(dl_pos)),
        alpha_u2b: gain_of(LinkClass::PicoToUe, ul_pos.distance(bs)),
        alpha_sic: cfg.duplex.sic()?.residual_coefficient(),
        n0_mw: cfg
            .channel
            .noise()
            .power_mw(NodeRole::DownlinkUe, cfg.duplex.bandwidth_hz),
        p_bs_max_mw: cfg.power.pico_tx_mw(),
        p_ue_max_mw: cfg.power.ue_tx_mw(),
    })
}

/// One DL UE position of the optimal-power map, with the binary solver and
/// the exhaustive-search oracle side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerMapRow {
    pub dl_x_m: f64,
    pub bpc_p_bs_mw: f64,
    pub bpc_p_ue_mw: f64,
    pub bpc_mode: SolutionMode,
    pub bpc_objective_bits: f64,
    pub oracle_p_bs_mw: f64,
    pub oracle_p_ue_mw: f64,
    pub oracle_mode: SolutionMode,
    pub oracle_objective_bits: f64,
}

/// X coordinate of the fixed UL UE in the power-map geometry, meters.
pub const POWER_MAP_UL_X_M: f64 = -25.0;

/// Optimal-power map study: BS at the origin, UL UE fixed at
/// (-25, 0), DL UE swept along the x axis. Shadowing-free by construction
/// so the map is a pure function of geometry.
pub fn run_power_map_study(
    cfg: &SimConfig,
    dl_xs: &[f64],
    oracle_grid: usize,
) -> Result<Vec<PowerMapRow>> {
    let ul = Position::new(POWER_MAP_UL_X_M, 0.0);
    dl_xs
        .iter()
        .map(|&x| {
            let ctx = pair_context_for_geometry(cfg, ul, Position::new(x, 0.0))?;
            let bpc = binary_power_control(&ctx)?;
            let oracle = exhaustive_search_oracle(&ctx, oracle_grid)?;
            Ok(PowerMapRow {
                dl_x_m: x,
                bpc_p_bs_mw: bpc.p_bs_mw,
                bpc_p_ue_mw: bpc.p_ue_mw,
                bpc_mode: bpc.mode,
                bpc_objective_bits: bpc.objective_bits,
                oracle_p_bs_mw: oracle.p_bs_mw,
                oracle_p_ue_mw: oracle.p_ue_mw,
                oracle_mode: oracle.mode,
                oracle_objective_bits: oracle.objective_bits,
            })
        })
        .collect()
}

pub fn write_power_map_csv<W: std::io::Write>(rows: &[PowerMapRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "dl_x_m",
        "bpc_p_bs_mw",
        "bpc_p_ue_mw",
        "bpc_mode",
        "bpc_objective_bits",
        "oracle_p_bs_mw",
        "oracle_p_ue_mw",
        "oracle_mode",
        "oracle_objective_bits",
    ])?;
    for r in rows {
        wtr.write_record([
            r.dl_x_m.to_string(),
            r.bpc_p_bs_mw.to_string(),
            r.bpc_p_ue_mw.to_string(),
            r.bpc_mode.to_string(),
            r.bpc_objective_bits.to_string(),
            r.oracle_p_bs_mw.to_string(),
            r.oracle_p_ue_mw.to_string(),
            r.oracle_mode.to_string(),
            r.oracle_objective_bits.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// One point of an exported SE-EE sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeEeCurveRow {
    /// "fd" or "hd".
    pub duplex: &'static str,
    pub dl_x_m: f64,
    pub p_ue_dbm: f64,
    pub se: f64,
    pub ee: f64,
}

/// SE-EE sweeps for the fixed-pair geometry (UL UE at (-25, 0), DL UE at
/// each of `dl_xs`), sweeping the UL power at a full-power BS. The HD
/// variant has no cross interference and splits the band at unchanged link
/// SINRs, which scales SE and EE by one half.
pub fn singlecell_se_ee_curves(
    cfg: &SimConfig,
    dl_xs: &[f64],
    points: usize,
) -> Result<Vec<SeEeCurveRow>> {
    let ul = Position::new(POWER_MAP_UL_X_M, 0.0);
    let mut rows = Vec::new();
    for &x in dl_xs {
        let ctx = pair_context_for_geometry(cfg, ul, Position::new(x, 0.0))?;
        let sweep = linspace(0.0, ctx.p_ue_max_mw, points);
        for p in se_ee_curve(&ctx, ctx.p_bs_max_mw, &sweep)? {
            rows.push(SeEeCurveRow {
                duplex: "fd",
                dl_x_m: x,
                p_ue_dbm: power_dbm(p.p_ue_mw),
                se: p.se,
                ee: p.ee,
            });
        }
        let hd_ctx = PairContext {
            alpha_u2d: 0.0,
            alpha_sic: 0.0,
            ..ctx
        };
        for p in se_ee_curve(&hd_ctx, hd_ctx.p_bs_max_mw, &sweep)? {
            rows.push(SeEeCurveRow {
                duplex: "hd",
                dl_x_m: x,
                p_ue_dbm: power_dbm(p.p_ue_mw),
                se: p.se / 2.0,
                ee: p.ee / 2.0,
            });
        }
    }
    Ok(rows)
}

pub fn write_se_ee_csv<W: std::io::Write>(rows: &[SeEeCurveRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["duplex", "dl_x_m", "p_ue_dbm", "se", "ee"])?;
    for r in rows {
        wtr.write_record([
            r.duplex.to_string(),
            r.dl_x_m.to_string(),
            r.p_ue_dbm.to_string(),
            r.se.to_string(),
            r.ee.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-drop interference category means for CDF plotting, one row per
/// (scheduler, drop, direction, category).
pub fn write_interference_csv<W: std::io::Write>(
    scenario: &str,
    campaigns: &[CampaignResult],
    w: W,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["scenario", "scheduler", "drop", "direction", "category", "power_dbm"])?;
    for c in campaigns {
        for d in &c.drops {
            for (direction, category, mean_mw) in d.stats.category_means() {
                wtr.write_record([
                    scenario.to_string(),
                    c.scheduler.to_string(),
                    d.drop_index.to_string(),
                    direction.to_string(),
                    category.to_string(),
                    power_dbm(mean_mw).to_string(),
                ])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// All resolved parameters of a run, written alongside the result files so
/// any output can be regenerated exactly.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: String,
    pub schedulers: Vec<String>,
    pub seed: u64,
    pub drops: u32,
    pub ttis: u32,
    pub sic_levels_db: Vec<f64>,
    pub pico_densities: Vec<u32>,
    pub outputs: Vec<String>,
    pub config: SimConfig,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &SimConfig, outputs: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            scenario: scenario_label(cfg),
            schedulers: cfg.plan.schedulers.iter().map(|s| s.to_string()).collect(),
            seed: cfg.run.seed,
            drops: cfg.run.drops,
            ttis: cfg.run.ttis,
            sic_levels_db: cfg.plan.sic_levels_db.clone(),
            pico_densities: cfg.plan.pico_densities.clone(),
            outputs,
            config: cfg.clone(),
        }
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }
}

/// First-drop artifacts for debugging: layout and gain CSVs plus one
/// scheduler's scheduling trace and per-TTI interference samples.
pub fn dump_first_drop(
    cfg: &SimConfig,
    scheduler: SchedulerKind,
    out_dir: &Path,
) -> Result<Vec<String>> {
    let drop = realize_drop(cfg, 0)?;
    let mut outputs = Vec::new();
    let layout_path = out_dir.join("layout.csv");
    drop.layout.write_csv(std::fs::File::create(&layout_path)?)?;
    outputs.push("layout.csv".to_string());
    let gains_path = out_dir.join("gains.csv");
    drop.gains.write_csv(std::fs::File::create(&gains_path)?)?;
    outputs.push("gains.csv".to_string());
    let opts = DropOptions {
        record_trace: true,
        record_breakdowns: true,
    };
    let outcome = run_drop(cfg, &drop, scheduler, &opts)?;
    let trace_path = out_dir.join("trace.csv");
    crate::engine::write_trace_csv(&outcome.trace, std::fs::File::create(&trace_path)?)?;
    outputs.push("trace.csv".to_string());
    let samples_path = out_dir.join("samples.csv");
    crate::engine::write_breakdown_samples_csv(
        &outcome,
        std::fs::File::create(&samples_path)?,
    )?;
    outputs.push("samples.csv".to_string());
    Ok(outputs)
}
