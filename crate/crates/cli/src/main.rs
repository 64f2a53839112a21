//! Command-line front end for the coverage mission planner.
//!
//! `plan` turns a mission JSON file into waypoint paths and reports,
//! `evaluate` re-runs the coverage simulation on stored (or foreign) paths,
//! and `costmodel` evaluates the time/cost chain for a known flight time.
//!
//! Exit codes: 0 success, 2 invalid input, 3 infeasible discretization
//! (no grid placement captures any free node), 4 infeasible partition,
//! 1 anything else.

use clap::{Parser, Subcommand, ValueEnum};
use coverage_planner::artifacts::{
    read_paths_geojson, write_evaluation_artifacts, write_plan_artifacts,
};
use coverage_planner::cost::{report_from_flight_time, CostParams, MissionCostReport};
use coverage_planner::grid::LabelMode;
use coverage_planner::mission_file::load_mission;
use coverage_planner::pipeline::{evaluate_paths, plan_mission, AblationMode};
use coverage_planner::PlanError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "coverage-planner",
    version,
    about = "Multi-UAV coverage mission planner"
)]
struct Cli {
    /// Cap the worker-thread count (default: all cores). Results do not
    /// depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AblationArg {
    /// Keep the identity grid placement (no optimization).
    None,
    /// Optimize the node-fill term only.
    J1,
    /// Optimize node fill and box fit.
    J1j2,
    /// Optimize all three placement terms.
    Full,
}

impl From<AblationArg> for AblationMode {
    fn from(a: AblationArg) -> Self {
        match a {
            AblationArg::None => AblationMode::IdentityOnly,
            AblationArg::J1 => AblationMode::FillOnly,
            AblationArg::J1j2 => AblationMode::FillAndBox,
            AblationArg::Full => AblationMode::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    /// Keep whole node cells inside the region (no waypoint leaves it).
    Strict,
    /// Keep any node whose center is inside (better area coverage).
    Better,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a mission and write paths + reports into --out.
    Plan {
        /// Mission description (JSON).
        #[arg(long)]
        mission: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Master seed; overrides the mission file's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Placement-optimizer variant.
        #[arg(long, value_enum, default_value_t = AblationArg::Full)]
        ablation: AblationArg,
        /// Node-labeling mode override.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Also write grid.pgm, sa_trace.csv, darp_trace.csv, regions.ppm.
        #[arg(long)]
        debug: bool,
    },
    /// Recompute the coverage report for stored waypoint paths.
    Evaluate {
        /// Paths GeoJSON (as written by `plan`, or hand-built).
        #[arg(long)]
        paths: PathBuf,
        /// Mission description the paths belong to.
        #[arg(long)]
        mission: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate mission time and cost for a known flight time.
    Costmodel {
        /// Fleet flight time in minutes.
        #[arg(long)]
        ft: f64,
        /// Number of UAVs.
        #[arg(long)]
        vn: usize,
        /// Survey area in square meters.
        #[arg(long)]
        area: f64,
        /// Batteries per UAV (default: derived from flight time).
        #[arg(long)]
        bats: Option<u32>,
        /// Cruise speed in m/s.
        #[arg(long, default_value_t = 3.0)]
        speed: f64,
    },
}

fn exit_code(err: &PlanError) -> u8 {
    match err {
        PlanError::InvalidInput(_) | PlanError::FleetConfiguration(_) | PlanError::Json(_) => 2,
        PlanError::InfeasibleDiscretization(_) | PlanError::InfeasibleMission(_) => 3,
        PlanError::InfeasiblePartition(_) => 4,
        PlanError::Io(_) => 1,
    }
}

fn print_cost(report: &MissionCostReport) {
    println!("flight time:          {:>10.2} min", report.flight_time_min);
    println!("deployment time:      {:>10.2} min", report.deployment_time_min);
    println!(
        "change battery delay: {:>10.2} min",
        report.change_battery_delay_min
    );
    println!("total time:           {:>10.2} min", report.total_time_min);
    println!("batteries per UAV:    {:>10}", report.batteries_per_uav);
    println!("flight cost:          {:>10.4}", report.flight_cost);
}

fn run(command: Command) -> Result<(), PlanError> {
    match command {
        Command::Plan {
            mission,
            out,
            seed,
            ablation,
            mode,
            debug,
        } => {
            let mut spec = load_mission(&mission, seed)?;
            spec.ablation = ablation.into();
            if let Some(mode) = mode {
                spec.mode = match mode {
                    ModeArg::Strict => LabelMode::StrictInPoly,
                    ModeArg::Better => LabelMode::BetterCoverage,
                };
            }
            let plan = plan_mission(&spec)?;
            let files = write_plan_artifacts(&plan, &out, debug)?;
            let p = &plan.solution.placement;
            println!(
                "placement: shift ({:.2}, {:.2}) m, rotation {:.2} deg, {} free nodes",
                p.shift_x,
                p.shift_y,
                p.rotation_deg,
                plan.grid.free_count()
            );
            println!(
                "partition: counts {:?}, {} cycles, converged: {}",
                plan.assignment.counts, plan.assignment.iterations, plan.assignment.converged
            );
            println!(
                "coverage:  PoC {:.2} %, PoOC {:.2} %",
                plan.coverage.poc_pct, plan.coverage.pooc_pct
            );
            println!(
                "cost:      total {:.2} min, {:.4}",
                plan.cost.total_time_min, plan.cost.flight_cost
            );
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Evaluate { paths, mission, out } => {
            let spec = load_mission(&mission, None)?;
            let waypoint_paths = read_paths_geojson(&paths)?;
            let report = evaluate_paths(&spec, &waypoint_paths)?;
            let files = write_evaluation_artifacts(&report, &out)?;
            println!(
                "coverage: PoC {:.2} %, PoOC {:.2} %",
                report.poc_pct, report.pooc_pct
            );
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Costmodel {
            ft,
            vn,
            area,
            bats,
            speed,
        } => {
            let report =
                report_from_flight_time(ft, vn, area, bats, &CostParams::with_speed(speed))?;
            print_cost(&report);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // Ignore failure: the global pool may already exist in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
