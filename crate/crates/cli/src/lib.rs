//! CLI plumbing for the freeway lane-allocation model: config resolution,
//! CSV/SVG artifact emission and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "laneopt",
    version,
    about = "Mixed CAV/manual freeway capacity model and dedicated-lane optimizer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mixed-traffic capacity as a function of CAV penetration
    Capacity(config::CommonArgs),
    /// Evaluate every candidate dedicated-lane count at one penetration rate
    Optimize(config::CommonArgs),
    /// Sweep penetration rates and write CSV/SVG artifacts
    Sweep(config::CommonArgs),
    /// Verify the headway mix against seeded ring Monte Carlo trials
    Simulate(SimulateArgs),
    /// Calibrate the demand level against transition-range targets
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: config::CommonArgs,
    /// Vehicles per ring (default 1000000)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of independent trials (default 10)
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub common: config::CommonArgs,
    /// Targets file with scenario,L,l_A,p_low,p_high rows; defaults to the
    /// bundled reference targets
    #[arg(long)]
    pub targets: Option<PathBuf>,
    /// Lowest demand candidate, veh/hr/lane
    #[arg(long, default_value_t = 4000.0)]
    pub d_min: f64,
    /// Highest demand candidate, veh/hr/lane
    #[arg(long, default_value_t = 6000.0)]
    pub d_max: f64,
    /// Demand grid step, veh/hr/lane
    #[arg(long, default_value_t = 50.0)]
    pub d_step: f64,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Capacity(args) => {
            let settings = config::resolve(&args)?;
            commands::cmd_capacity(&settings)
        }
        Command::Optimize(args) => {
            let settings = config::resolve(&args)?;
            commands::cmd_optimize(&settings)
        }
        Command::Sweep(args) => {
            let settings = config::resolve(&args)?;
            commands::cmd_sweep(&settings)
        }
        Command::Simulate(args) => {
            let mut settings = config::resolve(&args.common)?;
            if let Some(n) = args.n {
                settings.simulate.n = n;
            }
            if let Some(trials) = args.trials {
                settings.simulate.trials = trials;
            }
            commands::cmd_simulate(&settings)
        }
        Command::Calibrate(args) => {
            let settings = config::resolve(&args.common)?;
            commands::cmd_calibrate(
                &settings,
                args.targets.as_deref(),
                args.d_min,
                args.d_max,
                args.d_step,
            )
        }
    }
}
