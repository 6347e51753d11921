//! Single-cell sum-rate objective, the binary power-control solver with its
//! brute-force oracle, and SE-EE curve generation.
//!
//! All powers are linear mW and all gains are linear coefficients. The
//! objective is evaluated in bits per channel use via `ln_1p`, which keeps
//! relative error near machine precision even when a SINR term is ~1e-9;
//! the corner-optimality checks compare objectives at 1e-9 relative
//! tolerance and a naive `log2(1 + x)` loses half those digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every symbol of the two-link sum-rate objective for one BS plus one
/// UL/DL UE pair: direct gains, the UE-to-UE interference gain, the
/// residual self-interference coefficient, receiver noise and the power
/// budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairContext {
    /// BS to DL UE direct gain.
    pub alpha_b2d: f64,
    /// UL UE to DL UE interference gain.
    pub alpha_u2d: f64,
    /// UL UE to BS direct gain.
    pub alpha_u2b: f64,
    /// Residual self-interference coefficient at the BS.
    pub alpha_sic: f64,
    /// Receiver noise power in mW (single level for both receivers).
    pub n0_mw: f64,
    pub p_bs_max_mw: f64,
    pub p_ue_max_mw: f64,
}

impl PairContext {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_b2d", self.alpha_b2d),
            ("alpha_u2d", self.alpha_u2d),
            ("alpha_u2b", self.alpha_u2b),
            ("alpha_sic", self.alpha_sic),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be a finite nonnegative gain, got {v}")));
            }
        }
        for (name, v) in [
            ("n0_mw", self.n0_mw),
            ("p_bs_max_mw", self.p_bs_max_mw),
            ("p_ue_max_mw", self.p_ue_max_mw),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Which links carry power in a returned solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionMode {
    Fd,
    HdDlOnly,
    HdUlOnly,
}

impl std::fmt::Display for SolutionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolutionMode::Fd => "fd",
            SolutionMode::HdDlOnly => "hd_dl",
            SolutionMode::HdUlOnly => "hd_ul",
        })
    }
}

/// A power assignment with its objective value in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSolution {
    pub p_bs_mw: f64,
    pub p_ue_mw: f64,
    pub objective_bits: f64,
    pub mode: SolutionMode,
}

/// Sum of the DL and UL Shannon terms in bits per channel use:
/// `log2(1 + g_b2d p_bs / (n0 + g_u2d p_ue)) + log2(1 + g_u2b p_ue / (n0 + g_sic p_bs))`.
pub fn objective(ctx: &PairContext, p_bs_mw: f64, p_ue_mw: f64) -> Result<f64> {
    if p_bs_mw < 0.0 || p_ue_mw < 0.0 {
        return Err(Error::Domain(format!(
            "powers must be nonnegative, got p_bs = {p_bs_mw} mW, p_ue = {p_ue_mw} mW"
        )));
    }
    let dl_sinr = ctx.alpha_b2d * p_bs_mw / (ctx.n0_mw + ctx.alpha_u2d * p_ue_mw);
    let ul_sinr = ctx.alpha_u2b * p_ue_mw / (ctx.n0_mw + ctx.alpha_sic * p_bs_mw);
    Ok((dl_sinr.ln_1p() + ul_sinr.ln_1p()) / std::f64::consts::LN_2)
}

/// The three binary candidates in tie-break order: full power on both
/// links, then DL only, then UL only. `(0, 0)` is never a candidate; its
/// objective is 0 and is dominated whenever any gain is positive.
fn candidates(ctx: &PairContext) -> [(f64, f64, SolutionMode); 3] {
    [
        (ctx.p_bs_max_mw, ctx.p_ue_max_mw, SolutionMode::Fd),
        (ctx.p_bs_max_mw, 0.0, SolutionMode::HdDlOnly),
        (0.0, ctx.p_ue_max_mw, SolutionMode::HdUlOnly),
    ]
}

/// Picks the best of the three binary power candidates. Ties go to the
/// earlier candidate: full duplex, then DL only.
pub fn binary_power_control(ctx: &PairContext) -> Result<PowerSolution> {
    let mut best: Option<PowerSolution> = None;
    for (p_bs, p_ue, mode) in candidates(ctx) {
        let value = objective(ctx, p_bs, p_ue)?;
        if best.map_or(true, |b| value > b.objective_bits) {
            best = Some(PowerSolution {
                p_bs_mw: p_bs,
                p_ue_mw: p_ue,
                objective_bits: value,
                mode,
            });
        }
    }
    Ok(best.expect("three candidates evaluated"))
}

/// Argmax of the objective over a uniform `grid_points x grid_points`
/// power grid including both axis endpoints. Brute-force reference for
/// [`binary_power_control`].
pub fn exhaustive_search_oracle(ctx: &PairContext, grid_points: usize) -> Result<PowerSolution> {
    if grid_points < 2 {
        return Err(Error::Domain(format!(
            "grid_points must be at least 2, got {grid_points}"
        )));
    }
    let steps = (grid_points - 1) as f64;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_powers = (0.0, 0.0);
    for i in 0..grid_points {
        let p_bs = ctx.p_bs_max_mw * i as f64 / steps;
        // Hoist the DL numerator and UL denominator, constant along the row.
        let dl_num = ctx.alpha_b2d * p_bs;
        let ul_den = ctx.n0_mw + ctx.alpha_sic * p_bs;
        for j in 0..grid_points {
            let p_ue = ctx.p_ue_max_mw * j as f64 / steps;
            let dl_sinr = dl_num / (ctx.n0_mw + ctx.alpha_u2d * p_ue);
            let ul_sinr = ctx.alpha_u2b * p_ue / ul_den;
            let value = (dl_sinr.ln_1p() + ul_sinr.ln_1p()) / std::f64::consts::LN_2;
            if value > best_value {
                best_value = value;
                best_powers = (p_bs, p_ue);
            }
        }
    }
    let (p_bs, p_ue) = best_powers;
    let mode = if p_bs > 0.0 && p_ue > 0.0 {
        SolutionMode::Fd
    } else if p_ue == 0.0 && p_bs > 0.0 {
        SolutionMode::HdDlOnly
    } else {
        SolutionMode::HdUlOnly
    };
    Ok(PowerSolution {
        p_bs_mw: p_bs,
        p_ue_mw: p_ue,
        objective_bits: best_value,
        mode,
    })
}

/// One point of the SE-EE sweep; SE in bits per channel use, EE in bits
/// per channel use per mW of transmit power (scales to bits/joule with the
/// bandwidth).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeEePoint {
    pub p_ue_mw: f64,
    pub se: f64,
    pub ee: f64,
}

/// Sweeps the UL UE power at fixed BS power and returns the parametric
/// (SE, EE) curve. EE at zero total power is defined as 0.
pub fn se_ee_curve(
    ctx: &PairContext,
    p_bs_fixed_mw: f64,
    p_ue_sweep_mw: &[f64],
) -> Result<Vec<SeEePoint>> {
    let mut points = Vec::with_capacity(p_ue_sweep_mw.len());
    for &p_ue in p_ue_sweep_mw {
        if !(0.0..=ctx.p_ue_max_mw).contains(&p_ue) {
            return Err(Error::Domain(format!(
                "sweep power {p_ue} mW outside [0, {}]",
                ctx.p_ue_max_mw
            )));
        }
        let se = objective(ctx, p_bs_fixed_mw, p_ue)?;
        let total = p_bs_fixed_mw + p_ue;
        let ee = if total > 0.0 { se / total } else { 0.0 };
        points.push(SeEePoint { p_ue_mw: p_ue, se, ee });
    }
    Ok(points)
}

/// Discrete convexity of a parametric plane curve: consecutive segment
/// cross products never change sign, i.e. the polyline turns in one
/// direction only and lies on the boundary of its convex hull. The
/// transmit-only EE peaks at an interior sweep power, so a
/// chord-above-a-function test would misclassify the dome; the
/// turning-direction test is the axis-order-free statement of curve
/// convexity. Each cross product is twice a triangle area, so it is
/// compared against the point set's bounding-box area: turns enclosing
/// less than a millionth of the figure are neutral, which keeps the
/// verdict stable under axis rescaling and near-collinear tails.
pub fn is_convex_arc(points: &[(f64, f64)]) -> bool {
    const REL_TOL: f64 = 1e-6;
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let area = (max_x - min_x) * (max_y - min_y);
    if !area.is_finite() || area == 0.0 {
        return true;
    }
    let mut sign = 0.0f64;
    for w in points.windows(3) {
        let (ax, ay) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        let (bx, by) = (w[2].0 - w[1].0, w[2].1 - w[1].1);
        let cross = ax * by - ay * bx;
        if cross.abs() <= REL_TOL * area {
            continue;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn base_ctx() -> PairContext {
        PairContext {
            alpha_b2d: 1e-9,
            alpha_u2d: 1e-11,
            alpha_u2b: 1e-9,
            alpha_sic: 1e-11,
            n0_mw: 6.32e-10,
            p_bs_max_mw: 251.18864315095797,
            p_ue_max_mw: 199.5262314968879,
        }
    }

    fn random_ctx(rng: &mut impl Rng) -> PairContext {
        let log_uniform = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| {
            10f64.powf(rng.random_range(lo..hi))
        };
        PairContext {
            alpha_b2d: log_uniform(rng, -12.0, -6.0),
            alpha_u2d: log_uniform(rng, -14.0, -7.0),
            alpha_u2b: log_uniform(rng, -12.0, -6.0),
            alpha_sic: log_uniform(rng, -11.0, -5.0),
            n0_mw: log_uniform(rng, -10.0, -8.0),
            p_bs_max_mw: 251.18864315095797,
            p_ue_max_mw: 199.5262314968879,
        }
    }

    #[test]
    fn objective_matches_hand_evaluated_point() {
        // Both SINR terms equal 1.5, so f = 2 * log2(2.5).
        let ctx = PairContext {
            alpha_b2d: 3.0,
            alpha_u2d: 1.0,
            alpha_u2b: 3.0,
            alpha_sic: 1.0,
            n0_mw: 1.0,
            p_bs_max_mw: 1.0,
            p_ue_max_mw: 1.0,
        };
        let f = objective(&ctx, 1.0, 1.0).unwrap();
        assert_relative_eq!(f, 2.0 * 2.5f64.log2(), max_relative = 1e-15);
        assert_relative_eq!(f, 2.6438561897747244, max_relative = 1e-14);
    }

    #[test]
    fn objective_collapses_when_a_power_is_zero() {
        let ctx = base_ctx();
        let dl_only = objective(&ctx, ctx.p_bs_max_mw, 0.0).unwrap();
        let expected = (ctx.alpha_b2d * ctx.p_bs_max_mw / ctx.n0_mw).ln_1p() / std::f64::consts::LN_2;
        assert_relative_eq!(dl_only, expected, max_relative = 1e-15);
        assert_eq!(objective(&ctx, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn objective_decomposes_without_cross_interference() {
        let mut ctx = base_ctx();
        ctx.alpha_u2d = 0.0;
        ctx.alpha_sic = 0.0;
        let joint = objective(&ctx, ctx.p_bs_max_mw, ctx.p_ue_max_mw).unwrap();
        let dl = objective(&ctx, ctx.p_bs_max_mw, 0.0).unwrap();
        let ul = objective(&ctx, 0.0, ctx.p_ue_max_mw).unwrap();
        assert_relative_eq!(joint, dl + ul, max_relative = 1e-12);
    }

    #[test]
    fn objective_rejects_negative_powers() {
        let ctx = base_ctx();
        assert!(objective(&ctx, -1.0, 0.0).is_err());
        assert!(objective(&ctx, 0.0, -1e-12).is_err());
    }

    #[test]
    fn bpc_picks_fd_without_cross_interference() {
        let mut ctx = base_ctx();
        ctx.alpha_u2d = 0.0;
        ctx.alpha_sic = 0.0;
        let sol = binary_power_control(&ctx).unwrap();
        assert_eq!(sol.mode, SolutionMode::Fd);
        assert_eq!(sol.p_bs_mw, ctx.p_bs_max_mw);
        assert_eq!(sol.p_ue_mw, ctx.p_ue_max_mw);
    }

    #[test]
    fn bpc_falls_back_to_hd_under_heavy_cross_interference() {
        // DL UE adjacent to the UL UE: U2D interference swamps the DL link.
        let mut ctx = base_ctx();
        ctx.alpha_u2d = 1e-4;
        ctx.alpha_sic = 1e-11;
        let sol = binary_power_control(&ctx).unwrap();
        assert_ne!(sol.mode, SolutionMode::Fd);
        // Fallback consistency: the returned corner beats the FD corner.
        let fd = objective(&ctx, ctx.p_bs_max_mw, ctx.p_ue_max_mw).unwrap();
        assert!(sol.objective_bits >= fd);
    }

    #[test]
    fn bpc_solution_is_always_a_corner_with_consistent_mode() {
        let mut rng = seeded_rng(11, 0);
        for _ in 0..500 {
            let ctx = random_ctx(&mut rng);
            let sol = binary_power_control(&ctx).unwrap();
            match sol.mode {
                SolutionMode::Fd => {
                    assert_eq!((sol.p_bs_mw, sol.p_ue_mw), (ctx.p_bs_max_mw, ctx.p_ue_max_mw))
                }
                SolutionMode::HdDlOnly => {
                    assert_eq!((sol.p_bs_mw, sol.p_ue_mw), (ctx.p_bs_max_mw, 0.0))
                }
                SolutionMode::HdUlOnly => {
                    assert_eq!((sol.p_bs_mw, sol.p_ue_mw), (0.0, ctx.p_ue_max_mw))
                }
            }
        }
    }

    #[test]
    fn oracle_with_two_grid_points_enumerates_corners() {
        let ctx = base_ctx();
        let oracle = exhaustive_search_oracle(&ctx, 2).unwrap();
        let bpc = binary_power_control(&ctx).unwrap();
        assert_eq!(oracle.p_bs_mw, bpc.p_bs_mw);
        assert_eq!(oracle.p_ue_mw, bpc.p_ue_mw);
        assert_relative_eq!(oracle.objective_bits, bpc.objective_bits, max_relative = 1e-15);
    }

    #[test]
    fn oracle_rejects_degenerate_grid() {
        assert!(exhaustive_search_oracle(&base_ctx(), 1).is_err());
        assert!(exhaustive_search_oracle(&base_ctx(), 0).is_err());
    }

    #[test]
    fn oracle_agrees_with_bpc_on_random_contexts() {
        let mut rng = seeded_rng(12, 0);
        for _ in 0..200 {
            let ctx = random_ctx(&mut rng);
            let oracle = exhaustive_search_oracle(&ctx, 41).unwrap();
            let bpc = binary_power_control(&ctx).unwrap();
            let diff = (oracle.objective_bits - bpc.objective_bits) / bpc.objective_bits.max(1e-300);
            assert!(
                diff <= 1e-9,
                "grid beat corners by {diff:.3e} on {ctx:?}"
            );
            assert_eq!(oracle.p_bs_mw, bpc.p_bs_mw, "ctx {ctx:?}");
            assert_eq!(oracle.p_ue_mw, bpc.p_ue_mw, "ctx {ctx:?}");
        }
    }

    #[test]
    fn fd_objective_degrades_monotonically_in_u2d_gain() {
        let mut rng = seeded_rng(13, 0);
        for _ in 0..200 {
            let mut ctx = random_ctx(&mut rng);
            let mut prev = f64::INFINITY;
            for scale in [1.0, 2.0, 5.0, 10.0, 100.0] {
                ctx.alpha_u2d = 1e-12 * scale;
                let f = objective(&ctx, ctx.p_bs_max_mw, ctx.p_ue_max_mw).unwrap();
                assert!(f <= prev + 1e-12);
                prev = f;
            }
        }
    }

    #[test]
    fn objective_is_continuous_on_the_power_box() {
        let ctx = base_ctx();
        let n = 50;
        let eps = 1e-6;
        for i in 0..=n {
            for j in 0..=n {
                let p_bs = ctx.p_bs_max_mw * i as f64 / n as f64;
                let p_ue = ctx.p_ue_max_mw * j as f64 / n as f64;
                let f = objective(&ctx, p_bs, p_ue).unwrap();
                let f_eps = objective(&ctx, p_bs + eps, p_ue + eps).unwrap();
                assert!((f - f_eps).abs() < 1e-4, "jump at ({p_bs}, {p_ue})");
            }
        }
    }

    #[test]
    fn se_ee_curve_endpoints_and_domain_checks() {
        let ctx = base_ctx();
        let sweep = [0.0, 1.0, 10.0, ctx.p_ue_max_mw];
        let pts = se_ee_curve(&ctx, ctx.p_bs_max_mw, &sweep).unwrap();
        assert_eq!(pts.len(), 4);
        // p_ue = 0: DL-only rate over the BS power alone.
        let dl_only = objective(&ctx, ctx.p_bs_max_mw, 0.0).unwrap();
        assert_relative_eq!(pts[0].se, dl_only, max_relative = 1e-15);
        assert_relative_eq!(pts[0].ee, dl_only / ctx.p_bs_max_mw, max_relative = 1e-15);
        // Out-of-range sweep values are rejected.
        assert!(se_ee_curve(&ctx, ctx.p_bs_max_mw, &[ctx.p_ue_max_mw * 1.01]).is_err());
        assert!(se_ee_curve(&ctx, ctx.p_bs_max_mw, &[-1.0]).is_err());
        // Zero total power: EE defined as 0.
        let origin = se_ee_curve(&ctx, 0.0, &[0.0]).unwrap();
        assert_eq!(origin[0].ee, 0.0);
    }

    #[test]
    fn se_ee_curve_is_a_convex_arc() {
        let ctx = base_ctx();
        let sweep: Vec<f64> = (0..=100)
            .map(|i| ctx.p_ue_max_mw * i as f64 / 100.0)
            .collect();
        let pts = se_ee_curve(&ctx, ctx.p_bs_max_mw, &sweep).unwrap();
        let curve: Vec<(f64, f64)> = pts.iter().map(|p| (p.se, p.ee)).collect();
        assert!(is_convex_arc(&curve));
        // EE peaks strictly inside the sweep: best SE and best EE differ.
        let max_ee_idx = (0..curve.len())
            .max_by(|&a, &b| curve[a].1.total_cmp(&curve[b].1))
            .unwrap();
        assert!(max_ee_idx > 0 && max_ee_idx < curve.len() - 1);
    }

    #[test]
    fn convex_arc_check_distinguishes_shapes() {
        // Parabola sampled left to right: single turning direction.
        let dome: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = i as f64 / 19.0;
                (x, x * (1.0 - x))
            })
            .collect();
        assert!(is_convex_arc(&dome));
        // S-shape changes turning direction.
        let ess: Vec<(f64, f64)> = (-10..=10)
            .map(|i| {
                let x = i as f64 / 10.0;
                (x, x * x * x)
            })
            .collect();
        assert!(!is_convex_arc(&ess));
        // Collinear points are neutral.
        let line = [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)];
        assert!(is_convex_arc(&line));
    }
}
