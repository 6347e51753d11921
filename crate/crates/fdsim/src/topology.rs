//! Two-tier network topology: hexagonal macro layout, random pico and UE
//! drops, and cell association.
//!
//! The macro tier is a seven-site hexagonal layout (one site at the origin,
//! six at the surrounding hexagon vertices). Each macro site covers the
//! hexagonal cell of the site lattice: the set of points closer to it than
//! to any other site, clipped to the overall seven-hexagon region. Picos
//! and uniform-mode UEs are dropped uniformly inside a macro cell by
//! bounded-retry rejection sampling against the minimum-distance
//! constraints; clustered-mode UEs are dropped in an annulus around their
//! cluster pico.
//!
//! The layout pipeline is: macro sites, pico drop, UE drop, gain matrix
//! (see [`crate::channel`]), association, and finally UL/DL role
//! designation. Roles are assigned after association because the even
//! UL/DL split is enforced per serving cell, which in uniform mode is only
//! known once the biased RSS rule has run.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::GainMatrix;
use crate::config::PowerConfig;
use crate::error::{Error, Result};

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// What a node is, from the propagation model's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRole {
    MacroBs,
    PicoBs,
    UplinkUe,
    DownlinkUe,
}

impl NodeRole {
    pub fn is_ue(self) -> bool {
        matches!(self, NodeRole::UplinkUe | NodeRole::DownlinkUe)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeRole::MacroBs => "macro_bs",
            NodeRole::PicoBs => "pico_bs",
            NodeRole::UplinkUe => "uplink_ue",
            NodeRole::DownlinkUe => "downlink_ue",
        }
    }
}

/// How UEs are spread over the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UeDistribution {
    /// Uniform over each macro cell; association by biased RSS.
    Uniform,
    /// Dropped around a pico; always associated to that pico.
    Clustered,
}

impl UeDistribution {
    pub fn as_str(self) -> &'static str {
        match self {
            UeDistribution::Uniform => "uniform",
            UeDistribution::Clustered => "clustered",
        }
    }
}

/// Serving cell of a UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServingCell {
    Macro(usize),
    Pico(usize),
}

/// Region a UE was dropped in, before association.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentRegion {
    MacroCell(usize),
    ClusterPico(usize),
}

/// A dropped UE position together with its drop region.
#[derive(Debug, Clone, Copy)]
pub struct UePlacement {
    pub position: Position,
    pub parent: ParentRegion,
}

/// Topology parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Inter-site distance between adjacent macro sites, meters.
    pub isd_m: f64,
    /// Number of macro sites; the hexagonal layout requires exactly 7.
    pub num_macro_sites: usize,
    /// Picos dropped uniformly inside each macro cell.
    pub picos_per_macro: usize,
    pub ue_distribution: UeDistribution,
    /// UEs per macro cell (uniform distribution only).
    pub ues_per_macro: usize,
    /// UEs per pico cluster (clustered distribution only).
    pub ues_per_pico: usize,
    /// Cluster disc radius around a pico, meters.
    pub cluster_radius_m: f64,
    /// Drop disc radius for the isolated single-cell study, meters.
    pub singlecell_radius_m: f64,
    /// RSS bias added to pico cells during association, dB.
    pub association_bias_db: f64,
    pub macro_pico_min_dist_m: f64,
    pub pico_pico_min_dist_m: f64,
    pub pico_ue_min_dist_m: f64,
    /// Rejection-sampling budget per placed node.
    pub max_placement_retries: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            isd_m: 500.0,
            num_macro_sites: 7,
            picos_per_macro: 6,
            ue_distribution: UeDistribution::Uniform,
            ues_per_macro: 96,
            ues_per_pico: 4,
            cluster_radius_m: 40.0,
            singlecell_radius_m: 60.0,
            association_bias_db: 6.0,
            macro_pico_min_dist_m: 75.0,
            pico_pico_min_dist_m: 40.0,
            pico_ue_min_dist_m: 10.0,
            max_placement_retries: 1000,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.isd_m > 0.0) {
            return Err(Error::Config(format!(
                "isd_m must be positive, got {}",
                self.isd_m
            )));
        }
        if self.num_macro_sites != 7 {
            return Err(Error::Config(format!(
                "the hexagonal layout requires exactly 7 macro sites, got {}",
                self.num_macro_sites
            )));
        }
        if self.picos_per_macro == 0 {
            return Err(Error::Config("picos_per_macro must be at least 1".into()));
        }
        let ues = match self.ue_distribution {
            UeDistribution::Uniform => self.ues_per_macro,
            UeDistribution::Clustered => self.ues_per_pico,
        };
        if ues == 0 {
            return Err(Error::Config(
                "the active UE distribution must place at least 1 UE per region".into(),
            ));
        }
        if !(self.cluster_radius_m > self.pico_ue_min_dist_m) {
            return Err(Error::Config(format!(
                "cluster_radius_m ({}) must exceed pico_ue_min_dist_m ({})",
                self.cluster_radius_m, self.pico_ue_min_dist_m
            )));
        }
        if !(self.singlecell_radius_m > self.pico_ue_min_dist_m) {
            return Err(Error::Config(format!(
                "singlecell_radius_m ({}) must exceed pico_ue_min_dist_m ({})",
                self.singlecell_radius_m, self.pico_ue_min_dist_m
            )));
        }
        for (name, v) in [
            ("macro_pico_min_dist_m", self.macro_pico_min_dist_m),
            ("pico_pico_min_dist_m", self.pico_pico_min_dist_m),
            ("pico_ue_min_dist_m", self.pico_ue_min_dist_m),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if self.max_placement_retries == 0 {
            return Err(Error::Config("max_placement_retries must be at least 1".into()));
        }
        Ok(())
    }

    /// Total number of UEs in a drop.
    pub fn num_ues(&self) -> usize {
        match self.ue_distribution {
            UeDistribution::Uniform => self.num_macro_sites * self.ues_per_macro,
            UeDistribution::Clustered => {
                self.num_macro_sites * self.picos_per_macro * self.ues_per_pico
            }
        }
    }

    /// Apothem of a macro cell hexagon (half the inter-site distance).
    pub fn macro_apothem_m(&self) -> f64 {
        self.isd_m / 2.0
    }

    /// Circumradius of a macro cell hexagon.
    pub fn macro_circumradius_m(&self) -> f64 {
        self.isd_m / 3f64.sqrt()
    }
}

/// One realised network drop.
///
/// Global node indexing used by the gain matrix: macros come first, then
/// picos, then UEs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLayout {
    pub macro_positions: Vec<Position>,
    pub pico_positions: Vec<Position>,
    pub ue_positions: Vec<Position>,
    /// Per-UE role, same indexing as `ue_positions`.
    pub ue_roles: Vec<NodeRole>,
    /// Per-UE serving cell, same indexing as `ue_positions`.
    pub association: Vec<ServingCell>,
}

impl NetworkLayout {
    pub fn num_macros(&self) -> usize {
        self.macro_positions.len()
    }

    pub fn num_picos(&self) -> usize {
        self.pico_positions.len()
    }

    pub fn num_ues(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_macros() + self.num_picos() + self.num_ues()
    }

    pub fn macro_node(&self, m: usize) -> usize {
        debug_assert!(m < self.num_macros());
        m
    }

    pub fn pico_node(&self, p: usize) -> usize {
        debug_assert!(p < self.num_picos());
        self.num_macros() + p
    }

    pub fn ue_node(&self, u: usize) -> usize {
        debug_assert!(u < self.num_ues());
        self.num_macros() + self.num_picos() + u
    }

    pub fn node_role(&self, node: usize) -> NodeRole {
        let nm = self.num_macros();
        let np = self.num_picos();
        if node < nm {
            NodeRole::MacroBs
        } else if node < nm + np {
            NodeRole::PicoBs
        } else {
            self.ue_roles[node - nm - np]
        }
    }

    pub fn node_position(&self, node: usize) -> Position {
        let nm = self.num_macros();
        let np = self.num_picos();
        if node < nm {
            self.macro_positions[node]
        } else if node < nm + np {
            self.pico_positions[node - nm]
        } else {
            self.ue_positions[node - nm - np]
        }
    }

    /// UE indices served by the given pico, split by role, ascending.
    pub fn pico_members(&self, pico: usize) -> (Vec<usize>, Vec<usize>) {
        let mut ul = Vec::new();
        let mut dl = Vec::new();
        for (u, cell) in self.association.iter().enumerate() {
            if *cell == ServingCell::Pico(pico) {
                match self.ue_roles[u] {
                    NodeRole::UplinkUe => ul.push(u),
                    NodeRole::DownlinkUe => dl.push(u),
                    _ => unreachable!("UE role expected"),
                }
            }
        }
        (ul, dl)
    }

    /// Writes one row per node: `node_id,role,x,y,serving_cell`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["node_id", "role", "x", "y", "serving_cell"])?;
        for node in 0..self.num_nodes() {
            let pos = self.node_position(node);
            let role = self.node_role(node);
            let serving = if role.is_ue() {
                match self.association[node - self.num_macros() - self.num_picos()] {
                    ServingCell::Macro(m) => format!("macro:{m}"),
                    ServingCell::Pico(p) => format!("pico:{p}"),
                }
            } else {
                String::new()
            };
            wtr.write_record([
                node.to_string(),
                role.as_str().to_string(),
                pos.x.to_string(),
                pos.y.to_string(),
                serving,
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Unit vectors toward the six neighbouring sites of a hexagonal lattice.
const HEX_NEIGHBOR_ANGLES: [f64; 6] = [0.0, 60.0, 120.0, 180.0, 240.0, 300.0];

fn hex_neighbor_dirs() -> [(f64, f64); 6] {
    let mut dirs = [(0.0, 0.0); 6];
    for (k, deg) in HEX_NEIGHBOR_ANGLES.iter().enumerate() {
        let rad = deg.to_radians();
        dirs[k] = (rad.cos(), rad.sin());
    }
    dirs
}

/// Point-in-hexagon test for a macro cell: flat sides face the six
/// neighbouring sites, so the cell is the intersection of six half-planes
/// at apothem distance.
pub fn macro_cell_contains(center: Position, apothem_m: f64, p: Position) -> bool {
    let dx = p.x - center.x;
    let dy = p.y - center.y;
    hex_neighbor_dirs()
        .iter()
        .all(|(ux, uy)| dx * ux + dy * uy <= apothem_m + 1e-9)
}

/// True if `p` lies inside the overall seven-hexagon coverage region.
pub fn coverage_region_contains(cfg: &ScenarioConfig, macros: &[Position], p: Position) -> bool {
    macros
        .iter()
        .any(|&c| macro_cell_contains(c, cfg.macro_apothem_m(), p))
}

/// Seven macro sites: the origin plus the six hexagon vertices at ISD.
pub fn generate_macro_layout(cfg: &ScenarioConfig) -> Result<Vec<Position>> {
    cfg.validate()?;
    let mut sites = vec![Position::new(0.0, 0.0)];
    for deg in HEX_NEIGHBOR_ANGLES {
        let rad = deg.to_radians();
        sites.push(Position::new(cfg.isd_m * rad.cos(), cfg.isd_m * rad.sin()));
    }
    Ok(sites)
}

/// Uniform sample from a macro cell satisfying `accept`, within the retry
/// budget.
fn sample_in_macro_cell(
    cfg: &ScenarioConfig,
    center: Position,
    rng: &mut impl Rng,
    mut accept: impl FnMut(Position) -> bool,
) -> Option<Position> {
    let r = cfg.macro_circumradius_m();
    let apothem = cfg.macro_apothem_m();
    for _ in 0..cfg.max_placement_retries {
        let p = Position::new(
            center.x + rng.random_range(-r..=r),
            center.y + rng.random_range(-r..=r),
        );
        if macro_cell_contains(center, apothem, p) && accept(p) {
            return Some(p);
        }
    }
    None
}

/// Drops `picos_per_macro` picos uniformly in every macro cell, honouring
/// the macro-pico and pico-pico minimum distances.
pub fn drop_picos(
    cfg: &ScenarioConfig,
    macros: &[Position],
    rng: &mut impl Rng,
) -> Result<Vec<Position>> {
    cfg.validate()?;
    let mut picos: Vec<Position> = Vec::with_capacity(macros.len() * cfg.picos_per_macro);
    for (m, &center) in macros.iter().enumerate() {
        for k in 0..cfg.picos_per_macro {
            let placed = sample_in_macro_cell(cfg, center, rng, |p| {
                macros
                    .iter()
                    .all(|&mp| mp.distance(p) >= cfg.macro_pico_min_dist_m)
                    && picos
                        .iter()
                        .all(|&pp| pp.distance(p) >= cfg.pico_pico_min_dist_m)
            })
            .ok_or_else(|| {
                Error::DropGeneration(format!(
                    "could not place pico {k} in macro cell {m} within {} retries",
                    cfg.max_placement_retries
                ))
            })?;
            picos.push(placed);
        }
    }
    Ok(picos)
}

/// Uniform sample from the annulus `[r_min, r_max]` around `center`.
pub fn sample_in_annulus(center: Position, r_min: f64, r_max: f64, rng: &mut impl Rng) -> Position {
    let u: f64 = rng.random_range(0.0..1.0);
    let r = (r_min * r_min + u * (r_max * r_max - r_min * r_min)).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Position::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Drops UE positions according to the configured distribution.
///
/// Uniform mode places `ues_per_macro` UEs per macro cell, at least
/// `pico_ue_min_dist_m` from every pico. Clustered mode places
/// `ues_per_pico` UEs in the annulus between that distance and
/// `cluster_radius_m` around each pico, clipped to the coverage region.
pub fn drop_ues(
    cfg: &ScenarioConfig,
    macros: &[Position],
    picos: &[Position],
    rng: &mut impl Rng,
) -> Result<Vec<UePlacement>> {
    cfg.validate()?;
    let mut ues = Vec::with_capacity(cfg.num_ues());
    match cfg.ue_distribution {
        UeDistribution::Uniform => {
            for (m, &center) in macros.iter().enumerate() {
                for k in 0..cfg.ues_per_macro {
                    let placed = sample_in_macro_cell(cfg, center, rng, |p| {
                        picos
                            .iter()
                            .all(|&pp| pp.distance(p) >= cfg.pico_ue_min_dist_m)
                    })
                    .ok_or_else(|| {
                        Error::DropGeneration(format!(
                            "could not place UE {k} in macro cell {m} within {} retries",
                            cfg.max_placement_retries
                        ))
                    })?;
                    ues.push(UePlacement {
                        position: placed,
                        parent: ParentRegion::MacroCell(m),
                    });
                }
            }
        }
        UeDistribution::Clustered => {
            for (p, &pico) in picos.iter().enumerate() {
                for k in 0..cfg.ues_per_pico {
                    let mut placed = None;
                    for _ in 0..cfg.max_placement_retries {
                        let cand = sample_in_annulus(
                            pico,
                            cfg.pico_ue_min_dist_m,
                            cfg.cluster_radius_m,
                            rng,
                        );
                        let clear_of_picos = picos
                            .iter()
                            .all(|&pp| pp.distance(cand) >= cfg.pico_ue_min_dist_m);
                        if clear_of_picos && coverage_region_contains(cfg, macros, cand) {
                            placed = Some(cand);
                            break;
                        }
                    }
                    let placed = placed.ok_or_else(|| {
                        Error::DropGeneration(format!(
                            "could not place UE {k} around pico {p} within {} retries",
                            cfg.max_placement_retries
                        ))
                    })?;
                    ues.push(UePlacement {
                        position: placed,
                        parent: ParentRegion::ClusterPico(p),
                    });
                }
            }
        }
    }
    Ok(ues)
}

/// Associates every UE with a serving cell.
///
/// Uniform mode uses downlink RSS over the long-term gain (pathloss plus
/// shadowing) with `association_bias_db` added to pico cells; ties favour
/// the earlier candidate in macro-then-pico order. Clustered mode always
/// selects the cluster pico.
pub fn associate_ues(
    cfg: &ScenarioConfig,
    power: &PowerConfig,
    placements: &[UePlacement],
    num_macros: usize,
    num_picos: usize,
    gains: &GainMatrix,
) -> Vec<ServingCell> {
    placements
        .iter()
        .enumerate()
        .map(|(u, placement)| match placement.parent {
            ParentRegion::ClusterPico(p) => ServingCell::Pico(p),
            ParentRegion::MacroCell(_) => {
                let ue_node = num_macros + num_picos + u;
                let mut best = ServingCell::Macro(0);
                let mut best_rss = f64::NEG_INFINITY;
                for m in 0..num_macros {
                    let rss = power.macro_tx_dbm + 10.0 * gains.gain(m, ue_node).log10();
                    if rss > best_rss {
                        best_rss = rss;
                        best = ServingCell::Macro(m);
                    }
                }
                for p in 0..num_picos {
                    let rss = power.pico_tx_dbm
                        + 10.0 * gains.gain(num_macros + p, ue_node).log10()
                        + cfg.association_bias_db;
                    if rss > best_rss {
                        best_rss = rss;
                        best = ServingCell::Pico(p);
                    }
                }
                best
            }
        })
        .collect()
}

/// Splits every cell's UE population as evenly as possible into uplink and
/// downlink roles, with random assignment inside the split. Odd cells give
/// the extra UE to a random side.
pub fn designate_roles(
    association: &[ServingCell],
    num_macros: usize,
    num_picos: usize,
    rng: &mut impl Rng,
) -> Vec<NodeRole> {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); num_macros + num_picos];
    for (u, cell) in association.iter().enumerate() {
        let key = match cell {
            ServingCell::Macro(m) => *m,
            ServingCell::Pico(p) => num_macros + *p,
        };
        groups[key].push(u);
    }
    let mut roles = vec![NodeRole::DownlinkUe; association.len()];
    for group in &mut groups {
        group.shuffle(rng);
        let mut num_ul = group.len() / 2;
        if group.len() % 2 == 1 && rng.random_bool(0.5) {
            num_ul += 1;
        }
        for (i, &u) in group.iter().enumerate() {
            roles[u] = if i < num_ul {
                NodeRole::UplinkUe
            } else {
                NodeRole::DownlinkUe
            };
        }
    }
    roles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    #[test]
    fn macro_layout_is_origin_plus_hexagon() {
        let sites = generate_macro_layout(&cfg()).unwrap();
        assert_eq!(sites.len(), 7);
        assert_eq!(sites[0], Position::new(0.0, 0.0));
        for s in &sites[1..] {
            assert!((sites[0].distance(*s) - 500.0).abs() < 1e-9);
        }
        // Hexagon vertices at the ISD are also ISD apart from their ring
        // neighbours.
        for k in 1..=6 {
            let next = 1 + (k % 6);
            assert!((sites[k].distance(sites[next]) - 500.0).abs() < 1e-9);
        }
    }

    #[test]
    fn macro_layout_rejects_bad_config() {
        let mut bad = cfg();
        bad.isd_m = 0.0;
        assert!(matches!(generate_macro_layout(&bad), Err(Error::Config(_))));
        let mut bad = cfg();
        bad.num_macro_sites = 19;
        assert!(matches!(generate_macro_layout(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn macro_cell_test_matches_voronoi_on_lattice_sites() {
        let c = cfg();
        let sites = generate_macro_layout(&c).unwrap();
        let apothem = c.macro_apothem_m();
        let mut rng = seeded_rng(11, 0);
        for _ in 0..2000 {
            let p = Position::new(rng.random_range(-800.0..800.0), rng.random_range(-800.0..800.0));
            for (i, &s) in sites.iter().enumerate() {
                if macro_cell_contains(s, apothem, p) {
                    // Inside a hexagon, no other site is strictly closer.
                    let own = s.distance(p);
                    for (j, &o) in sites.iter().enumerate() {
                        if i != j {
                            assert!(o.distance(p) >= own - 1e-6);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pico_drop_honours_counts_and_distances() {
        let c = cfg();
        let sites = generate_macro_layout(&c).unwrap();
        for seed in 0..20u64 {
            let mut rng = seeded_rng(seed, 0);
            let picos = drop_picos(&c, &sites, &mut rng).unwrap();
            assert_eq!(picos.len(), 42);
            for (i, &p) in picos.iter().enumerate() {
                assert!(sites.iter().all(|&m| m.distance(p) >= 75.0));
                for (j, &q) in picos.iter().enumerate() {
                    if i != j {
                        assert!(p.distance(q) >= 40.0);
                    }
                }
                assert!(coverage_region_contains(&c, &sites, p));
            }
        }
    }

    #[test]
    fn pico_drop_is_deterministic_in_seed() {
        let c = cfg();
        let sites = generate_macro_layout(&c).unwrap();
        let a = drop_picos(&c, &sites, &mut seeded_rng(3, 0)).unwrap();
        let b = drop_picos(&c, &sites, &mut seeded_rng(3, 0)).unwrap();
        assert_eq!(a, b);
        let d = drop_picos(&c, &sites, &mut seeded_rng(4, 0)).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn pico_drop_fails_when_constraints_are_unsatisfiable() {
        let mut c = cfg();
        // More picos than a macro cell can hold at a 300 m mutual spacing.
        c.picos_per_macro = 12;
        c.pico_pico_min_dist_m = 300.0;
        let sites = generate_macro_layout(&c).unwrap();
        let err = drop_picos(&c, &sites, &mut seeded_rng(0, 0)).unwrap_err();
        assert!(matches!(err, Error::DropGeneration(_)));
    }

    #[test]
    fn uniform_ue_drop_counts_and_clears_picos() {
        let c = cfg();
        let sites = generate_macro_layout(&c).unwrap();
        let mut rng = seeded_rng(5, 0);
        let picos = drop_picos(&c, &sites, &mut rng).unwrap();
        let ues = drop_ues(&c, &sites, &picos, &mut rng).unwrap();
        assert_eq!(ues.len(), 7 * 96);
        for ue in &ues {
            assert!(coverage_region_contains(&c, &sites, ue.position));
            assert!(picos.iter().all(|&p| p.distance(ue.position) >= 10.0));
            assert!(matches!(ue.parent, ParentRegion::MacroCell(_)));
        }
    }

    #[test]
    fn clustered_ue_drop_stays_in_annulus() {
        let mut c = cfg();
        c.ue_distribution = UeDistribution::Clustered;
        let sites = generate_macro_layout(&c).unwrap();
        let mut rng = seeded_rng(6, 0);
        let picos = drop_picos(&c, &sites, &mut rng).unwrap();
        let ues = drop_ues(&c, &sites, &picos, &mut rng).unwrap();
        assert_eq!(ues.len(), 42 * 4);
        for ue in &ues {
            let ParentRegion::ClusterPico(p) = ue.parent else {
                panic!("clustered UE must have a cluster pico parent");
            };
            let d = picos[p].distance(ue.position);
            assert!((10.0..=40.0 + 1e-9).contains(&d), "distance {d}");
        }
    }

    #[test]
    fn role_split_is_even_per_cell() {
        // 5 UEs on pico 0, 4 on pico 1, 1 on macro 0.
        let association = vec![
            ServingCell::Pico(0),
            ServingCell::Pico(0),
            ServingCell::Pico(1),
            ServingCell::Pico(0),
            ServingCell::Pico(1),
            ServingCell::Macro(0),
            ServingCell::Pico(1),
            ServingCell::Pico(0),
            ServingCell::Pico(1),
            ServingCell::Pico(0),
        ];
        let mut rng = seeded_rng(9, 0);
        let roles = designate_roles(&association, 1, 2, &mut rng);
        for cell in [ServingCell::Pico(0), ServingCell::Pico(1), ServingCell::Macro(0)] {
            let members: Vec<_> = association
                .iter()
                .enumerate()
                .filter(|(_, c)| **c == cell)
                .map(|(u, _)| u)
                .collect();
            let ul = members
                .iter()
                .filter(|&&u| roles[u] == NodeRole::UplinkUe)
                .count() as i64;
            let dl = members.len() as i64 - ul;
            assert!((ul - dl).abs() <= 1, "cell {cell:?}: {ul} UL vs {dl} DL");
        }
    }

    #[test]
    fn layout_csv_lists_every_node() {
        let layout = NetworkLayout {
            macro_positions: vec![Position::new(0.0, 0.0)],
            pico_positions: vec![Position::new(100.0, 0.0)],
            ue_positions: vec![Position::new(110.0, 0.0), Position::new(90.0, 5.0)],
            ue_roles: vec![NodeRole::UplinkUe, NodeRole::DownlinkUe],
            association: vec![ServingCell::Pico(0), ServingCell::Macro(0)],
        };
        let mut buf = Vec::new();
        layout.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "node_id,role,x,y,serving_cell");
        assert!(lines[2].starts_with("1,pico_bs,100,0,"));
        assert!(lines[3].ends_with("pico:0"));
        assert!(lines[4].ends_with("macro:0"));
    }
}
