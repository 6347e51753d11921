//! Command-line front end for the simulator: scheduler comparisons,
//! parameter sweeps, the isolated-cell studies and the optimal-power map,
//! each writing CSV results plus a JSON manifest into an output directory.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use fdsim::experiment::{
    dump_first_drop, linspace, run_comparison, run_density_sweep, run_power_map_study,
    run_sic_sweep, run_singlecell_study, singlecell_se_ee_curves, write_interference_csv,
    write_power_map_csv, write_se_ee_csv, RunManifest,
};
use fdsim::scheduling::SchedulerKind;
use fdsim::SimConfig;

#[derive(Debug, Parser)]
#[command(name = "fdsim-cli", version, about = "Full-duplex cellular network simulator")]
struct Cli {
    /// TOML configuration file; built-in defaults apply when omitted.
    #[arg(long, global = true, env = "FDSIM_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,

    /// Campaign seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of drops override.
    #[arg(long, global = true)]
    drops: Option<u32>,

    /// TTIs per drop override.
    #[arg(long, global = true)]
    ttis: Option<u32>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "results", value_name = "DIR")]
    out: PathBuf,

    /// Scheduler to run (repeatable); overrides the configured plan.
    #[arg(long = "scheduler", global = true, value_name = "NAME")]
    schedulers: Vec<SchedulerKind>,

    /// Worker threads; 0 keeps the rayon default.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare schedulers on the configured multi-cell scenario.
    Run {
        /// Also write the first drop's layout, gains, scheduling trace and
        /// per-TTI interference samples.
        #[arg(long)]
        dump_first_drop: bool,
    },
    /// Sweep the self-interference cancellation level and report, per
    /// full-duplex scheduler, where its rate gain turns positive.
    SweepSic,
    /// Sweep the number of picocells per macro area.
    SweepDensity,
    /// Isolated-cell studies: random four-UE drops plus rate and
    /// energy-efficiency curves versus uplink power for fixed geometries.
    Singlecell {
        /// Drop disc radius in meters; overrides the configured value.
        #[arg(long)]
        radius: Option<f64>,

        /// Downlink UE x positions for the curve export, meters.
        #[arg(long = "curve-x", value_name = "X", default_values_t = [0.0, 10.0, 35.0, 50.0])]
        curve_xs: Vec<f64>,

        /// Uplink power points per curve.
        #[arg(long, default_value_t = 41)]
        curve_points: usize,
    },
    /// Optimal transmit powers versus downlink UE position, with the
    /// exhaustive-search oracle alongside the closed-form control.
    PowerMap {
        #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
        x_min: f64,

        #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
        x_max: f64,

        /// Number of swept positions.
        #[arg(long, default_value_t = 81)]
        points: usize,

        /// Grid resolution per power axis for the exhaustive search.
        #[arg(long, default_value_t = 201)]
        oracle_grid: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::SweepSic => "sweep-sic",
            Command::SweepDensity => "sweep-density",
            Command::Singlecell { .. } => "singlecell",
            Command::PowerMap { .. } => "power-map",
        }
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<SimConfig> {
    let mut cfg = match &cli.config {
        Some(path) => SimConfig::load(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => SimConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(drops) = cli.drops {
        cfg.run.drops = drops;
    }
    if let Some(ttis) = cli.ttis {
        cfg.run.ttis = ttis;
    }
    if !cli.schedulers.is_empty() {
        let mut schedulers = cli.schedulers.clone();
        schedulers.dedup();
        cfg.plan.schedulers = schedulers;
    }
    if let Command::Singlecell {
        radius: Some(radius),
        ..
    } = cli.command
    {
        cfg.scenario.singlecell_radius_m = radius;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create_out(dir: &Path, name: &str) -> anyhow::Result<File> {
    File::create(dir.join(name)).with_context(|| format!("creating {name}"))
}

fn write_crossings_csv<W: std::io::Write>(
    crossings: &[fdsim::experiment::SicCrossing],
    w: W,
) -> anyhow::Result<()> {
    let mut w = std::io::BufWriter::new(w);
    use std::io::Write;
    writeln!(w, "scheduler,crossing_sic_db")?;
    for c in crossings {
        match c.crossing_sic_db {
            Some(db) => writeln!(w, "{},{db}", c.scheduler)?,
            None => writeln!(w, "{},", c.scheduler)?,
        }
    }
    w.flush()?;
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .context("configuring worker pool")?;
    }
    let cfg = load_config(&cli)?;
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("creating output directory {}", cli.out.display()))?;

    let mut outputs: Vec<String> = Vec::new();
    match &cli.command {
        Command::Run { dump_first_drop: dump } => {
            let (table, campaigns) = run_comparison(&cfg)?;
            table.write_csv(create_out(&cli.out, "summary.csv")?)?;
            outputs.push("summary.csv".into());
            write_interference_csv(
                cfg.scenario.ue_distribution.as_str(),
                &campaigns,
                create_out(&cli.out, "interference.csv")?,
            )?;
            outputs.push("interference.csv".into());
            if *dump {
                let scheduler = *cfg
                    .plan
                    .schedulers
                    .first()
                    .expect("validated plan has at least one scheduler");
                outputs.extend(dump_first_drop(&cfg, scheduler, &cli.out)?);
            }
        }
        Command::SweepSic => {
            let sweep = run_sic_sweep(&cfg)?;
            sweep.table.write_csv(create_out(&cli.out, "summary.csv")?)?;
            outputs.push("summary.csv".into());
            write_crossings_csv(&sweep.crossings, create_out(&cli.out, "crossings.csv")?)?;
            outputs.push("crossings.csv".into());
            for c in &sweep.crossings {
                match c.crossing_sic_db {
                    Some(db) => println!("{}: gain turns positive at {db} dB", c.scheduler),
                    None => println!("{}: no positive gain in the swept range", c.scheduler),
                }
            }
        }
        Command::SweepDensity => {
            let table = run_density_sweep(&cfg)?;
            table.write_csv(create_out(&cli.out, "summary.csv")?)?;
            outputs.push("summary.csv".into());
        }
        Command::Singlecell {
            curve_xs,
            curve_points,
            ..
        } => {
            let table = run_singlecell_study(&cfg)?;
            table.write_csv(create_out(&cli.out, "summary.csv")?)?;
            outputs.push("summary.csv".into());
            let curves = singlecell_se_ee_curves(&cfg, curve_xs, *curve_points)?;
            write_se_ee_csv(&curves, create_out(&cli.out, "se_ee.csv")?)?;
            outputs.push("se_ee.csv".into());
        }
        Command::PowerMap {
            x_min,
            x_max,
            points,
            oracle_grid,
        } => {
            anyhow::ensure!(*points >= 2, "power map needs at least two positions");
            let xs = linspace(*x_min, *x_max, *points);
            let rows = run_power_map_study(&cfg, &xs, *oracle_grid)?;
            write_power_map_csv(&rows, create_out(&cli.out, "power_map.csv")?)?;
            outputs.push("power_map.csv".into());
        }
    }

    let manifest = RunManifest::new(cli.command.name(), &cfg, outputs);
    manifest.write_json(cli.out.join("manifest.json"))?;
    for name in &manifest.outputs {
        println!("wrote {}", cli.out.join(name).display());
    }
    println!("wrote {}", cli.out.join("manifest.json").display());
    Ok(())
}
