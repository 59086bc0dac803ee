use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use flock_core::runner::{run_experiment, run_figures, RunnerError};
use flock_core::scenario::{load_scenario, Overrides, ScenarioError};
use flock_core::sim::{Measurement, Model};

/// Batch driver for decentralized flocking experiments.
#[derive(Parser)]
#[command(name = "flock", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a scenario and write trajectory, metrics, and summary files.
    Run(RunArgs),
    /// Integrate a scenario and write plot-ready figure tables.
    Figures(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML grammar, .scn by convention).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Replaces the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the scenario's step count (total_time_s / dt_s).
    #[arg(long)]
    steps: Option<usize>,
    /// Replaces the scenario's control model.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Replaces the scenario's measurement mode.
    #[arg(long, value_enum)]
    measurement: Option<MeasurementArg>,
    /// Squash every velocity unconditionally and restrict intruder
    /// surveillance to the band outside the attraction zone.
    #[arg(long)]
    strict_paper_mode: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Zone,
    Simplified,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasurementArg {
    Position,
    Bearing,
    BearingFd,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            model: self.model.map(|m| match m {
                ModelArg::Zone => Model::Zone,
                ModelArg::Simplified => Model::Simplified,
            }),
            measurement: self.measurement.map(|m| match m {
                MeasurementArg::Position => Measurement::Position,
                MeasurementArg::Bearing => Measurement::Bearing,
                MeasurementArg::BearingFd => Measurement::BearingFd,
            }),
            strict_paper_mode: self.strict_paper_mode,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprint!(": {cause}");
                source = cause.source();
            }
            eprintln!();
            // 1 = the scenario was rejected, 2 = the run itself failed.
            match e {
                RunnerError::Scenario(_) => ExitCode::from(1),
                RunnerError::Io { .. } | RunnerError::NonFinite { .. } => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), RunnerError> {
    match cli.cmd {
        Cmd::Run(args) => {
            let scenario = load(&args)?;
            let (summary, files) = run_experiment(&scenario, &args.out, args.steps)?;
            println!("wrote {}", files.trajectory.display());
            println!("wrote {}", files.metrics.display());
            if let Some(aliens) = &files.aliens {
                println!("wrote {}", aliens.display());
            }
            println!("wrote {}", files.summary.display());
            println!("min_distance_m = {}", summary.min_distance);
            println!("mean_final_speed_mps = {}", summary.mean_final_speed);
            println!("max_control_mps2 = {}", summary.max_control_norm);
            println!("fragmentation_episodes = {}", summary.fragmentation_episodes);
            Ok(())
        }
        Cmd::Figures(args) => {
            let scenario = load(&args)?;
            for path in run_figures(&scenario, &args.out, args.steps)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn load(args: &RunArgs) -> Result<flock_core::scenario::Scenario, ScenarioError> {
    load_scenario(&args.scenario, &args.overrides())
}
