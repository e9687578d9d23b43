//! `dualmode`: stability, optimal partition and assignment sweeps, and
//! simulation validation for the dual-mode offloading model.

mod commands;
mod error;
mod scenario;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualmode_core::{presets, SimConfig};

use commands::{Grid, Outcome, ValidateOptions};
use error::{CliError, CliResult};
use scenario::{load_scenario, parse_grid, Axis, Scenario, SimSection, SweepSection, System};

/// Environment variable with the worker-thread count; unset or `0` means
/// one per core.
pub const THREADS_ENV: &str = "DUALMODE_THREADS";

const DEFAULT_P_POINTS: usize = 401;
const DEFAULT_JOBS: u64 = 1_000_000;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_PASS_THRESHOLD: f64 = 8.0 / 9.0;

#[derive(Parser)]
#[command(name = "dualmode", version, about = "Delay analysis of a two-stage dual-mode offloading system")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML). Repeatable; sweep and sim settings come from the first file.
    #[arg(long, global = true, value_name = "FILE")]
    scenario: Vec<PathBuf>,
    /// Built-in system. Repeatable.
    #[arg(long, global = true, value_name = "NAME", value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES))]
    preset: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct AxisArgs {
    /// Units of the load values.
    #[arg(long, value_enum)]
    axis: Option<Axis>,
    /// Shorthand for `--axis lambda`.
    #[arg(long, conflicts_with = "axis")]
    absolute: bool,
}

impl AxisArgs {
    fn resolve(&self, sweep: &SweepSection, default: Axis) -> Axis {
        if self.absolute {
            Axis::Lambda
        } else {
            self.axis.or(sweep.axis).unwrap_or(default)
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Load grid: `a,b,c` or `lo:hi:n`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[command(flatten)]
    axis: AxisArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical parameters, capacity, class and structural thresholds.
    Info,
    /// Delay under the optimal partition as a function of p, per load.
    DelayVsP {
        /// Loads: `a,b,c` or `lo:hi:n` (default rho 0.3,0.5,0.7).
        #[arg(long, allow_hyphen_values = true)]
        loads: Option<String>,
        #[command(flatten)]
        axis: AxisArgs,
        /// Number of evenly spaced p values over [0, 1].
        #[arg(long)]
        p_points: Option<usize>,
    },
    /// Optimal assignment p* across a load grid (default: 99 points across each system's range).
    PstarVsLoad(GridArgs),
    /// Optimal delay against the tunable-mode lower bound (default rho 0.01:0.99:99).
    DelayVsLoad(GridArgs),
    /// Simulate at the optimal operating points and compare with the formulas
    /// (default: 0.3, 0.6, 0.85 of each system's range).
    Validate {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Measured departures per point.
        #[arg(long)]
        jobs: Option<u64>,
        /// Departures discarded before measuring (default 10% of --jobs).
        #[arg(long)]
        warmup: Option<u64>,
        #[arg(long)]
        batches: Option<u64>,
        #[arg(long)]
        confidence: Option<f64>,
        /// Fraction of points that must pass (default 8/9).
        #[arg(long)]
        pass_threshold: Option<f64>,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Scenario(format!("{THREADS_ENV}={value:?} is not a thread count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Scenario(e.to_string()))?;
    }
    Ok(())
}

fn gather_systems(common: &Common) -> CliResult<(Vec<System>, SweepSection, SimSection)> {
    let scenarios: Vec<Scenario> = common.scenario.iter().map(|p| load_scenario(p)).collect::<CliResult<_>>()?;
    let (sweep, sim) = scenarios
        .first()
        .map(|s| (s.sweep.clone(), s.sim.clone()))
        .unwrap_or_default();
    let mut systems: Vec<System> = scenarios.into_iter().map(|s| s.system).collect();
    for name in &common.preset {
        systems.push(System::preset(name)?);
    }
    if systems.is_empty() {
        return Err(CliError::Scenario("no system given; use --scenario or --preset".to_string()));
    }
    Ok((systems, sweep, sim))
}

fn grid_from(flag: &Option<String>, file: &Option<scenario::GridSpec>, default: &str) -> CliResult<Vec<f64>> {
    match (flag, file) {
        (Some(text), _) => parse_grid(text),
        (None, Some(spec)) => spec.values(),
        (None, None) => parse_grid(default),
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let (systems, sweep, sim) = gather_systems(&cli.common)?;
    match &cli.command {
        Command::Info => commands::info(&systems),
        Command::DelayVsP { loads, axis, p_points } => {
            let grid = Grid {
                values: grid_from(loads, &sweep.loads, "0.3,0.5,0.7")?,
                axis: axis.resolve(&sweep, Axis::Rho),
            };
            let points = p_points.or(sweep.p_points).unwrap_or(DEFAULT_P_POINTS);
            commands::delay_vs_p(&systems, &grid, points)
        }
        Command::PstarVsLoad(args) => {
            let explicit = args.grid.is_some() || sweep.grid.is_some();
            let default_axis = if explicit { Axis::Rho } else { Axis::Fraction };
            let grid = Grid {
                values: grid_from(&args.grid, &sweep.grid, "0.01:0.99:99")?,
                axis: args.axis.resolve(&sweep, default_axis),
            };
            commands::pstar_vs_load(&systems, &grid)
        }
        Command::DelayVsLoad(args) => {
            let grid = Grid {
                values: grid_from(&args.grid, &sweep.grid, "0.01:0.99:99")?,
                axis: args.axis.resolve(&sweep, Axis::Rho),
            };
            commands::delay_vs_load(&systems, &grid)
        }
        Command::Validate { grid, seed, jobs, warmup, batches, confidence, pass_threshold } => {
            let explicit = grid.grid.is_some() || sweep.grid.is_some();
            let default_axis = if explicit { Axis::Rho } else { Axis::Fraction };
            let loads = Grid {
                values: grid_from(&grid.grid, &sweep.grid, "0.3,0.6,0.85")?,
                axis: grid.axis.resolve(&sweep, default_axis),
            };
            let jobs = jobs.or(sim.jobs).unwrap_or(DEFAULT_JOBS);
            let mut config = SimConfig::new(seed.or(sim.seed).unwrap_or(DEFAULT_SEED), jobs);
            if let Some(w) = warmup.or(sim.warmup) {
                config.warmup_jobs = w;
            }
            if let Some(b) = batches.or(sim.batches) {
                config.batches = b;
            }
            if let Some(c) = confidence.or(sim.confidence) {
                config.confidence = c;
            }
            let opts = ValidateOptions {
                config,
                pass_threshold: pass_threshold.or(sim.pass_threshold).unwrap_or(DEFAULT_PASS_THRESHOLD),
            };
            commands::validate(&systems, &loads, &opts)
        }
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> CliResult<()> {
    let sink: Box<dyn Write> = match &cli.common.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match cli.common.format {
        Format::Csv => outcome.table.write_csv(&mut w)?,
        Format::Json => outcome.table.write_json(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| run(&cli))
        .and_then(|outcome| emit(&cli, &outcome).map(|()| outcome.failure));
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) | Err(failure) => {
            eprintln!("dualmode: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
