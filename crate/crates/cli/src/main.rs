//! `cherenkov`: evaluate scenarios and write CSV tables plus a run manifest.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cherenkov_core::{Error, Result, Scenario};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::RunInfo;

#[derive(Parser, Serialize)]
#[command(name = "cherenkov", version, about = "Cherenkov emission in dispersive anisotropic media")]
struct Cli {
    /// Scenario file, or the name of a preset (see CHERENKOV_PRESET_DIR).
    #[arg(long, global = true)]
    scenario: Option<String>,
    /// Directory for the CSV tables and manifest.json.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; recorded in the manifest but currently unused.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Dielectric response on the circular basis.
    Epsilon(EpsilonArgs),
    /// Propagating modes for propagation directions in the xz plane.
    Modes(ModesArgs),
    /// Cherenkov poles over a frequency range.
    Poles(PolesArgs),
    /// Wave and group cones at the scenario's centre frequency.
    Cone(ConeArgs),
    /// Intensity on an (x_perp, z) grid at fixed time.
    Map(MapArgs),
    /// Complex field at one point.
    Field(FieldArgs),
    /// Cone quantities along one scenario parameter.
    Sweep(SweepArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Epsilon(_) => "epsilon",
            Command::Modes(_) => "modes",
            Command::Poles(_) => "poles",
            Command::Cone(_) => "cone",
            Command::Map(_) => "map",
            Command::Field(_) => "field",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Args, Serialize)]
pub struct EpsilonArgs {
    /// Lower frequency (rad/s); defaults to the scenario's integration window.
    #[arg(long)]
    pub omega_min: Option<f64>,
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
}

#[derive(Args, Serialize)]
pub struct ModesArgs {
    /// Defaults to omega_bar.
    #[arg(long)]
    pub omega_center: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub omega_span: f64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Polar angle of k from the z axis (rad).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta_min: f64,
    /// Defaults to --theta-min.
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub theta_samples: usize,
}

#[derive(Args, Serialize)]
pub struct PolesArgs {
    /// Defaults to omega_bar.
    #[arg(long)]
    pub omega_center: Option<f64>,
    /// Full width of the frequency range (rad/s).
    #[arg(long, default_value_t = 0.0)]
    pub omega_span: f64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Overrides the scenario's charge velocity.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Args, Serialize)]
pub struct ConeArgs {
    /// Scenario parameter echoed in the second column.
    #[arg(long, default_value = "charge.beta")]
    pub param: String,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed-form Gaussian group-cone profile.
    Gaussian,
    /// Pole-residue frequency integral.
    Integral,
}

#[derive(Args, Serialize)]
pub struct MapArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, num_args = 2, required = true, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    pub xperp_range: Vec<f64>,
    #[arg(long, num_args = 2, required = true, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    pub z_range: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    pub nx: usize,
    #[arg(long, default_value_t = 128)]
    pub nz: usize,
    #[arg(long, value_enum, default_value_t = Method::Gaussian)]
    pub method: Method,
    /// Integrate every emitting branch instead of branch 1 only.
    #[arg(long)]
    pub both_branches: bool,
}

#[derive(Args, Serialize)]
pub struct FieldArgs {
    #[arg(long)]
    pub x_perp: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long)]
    pub both_branches: bool,
}

#[derive(Args, Serialize)]
pub struct SweepArgs {
    /// Dotted key, e.g. charge.beta, omega_bar, medium.rabi.
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    /// Defaults to --from.
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
}

fn run(cli: &Cli) -> Result<Option<Error>> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidInput("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let spec = cli.scenario.as_deref().ok_or_else(|| Error::InvalidInput("--scenario is required".into()))?;
    let scenario = Scenario::load(spec)?;
    let start = Instant::now();
    let result = match &cli.command {
        Command::Epsilon(a) => commands::epsilon(&scenario, a),
        Command::Modes(a) => commands::modes(&scenario, a),
        Command::Poles(a) => commands::poles(&scenario, a),
        Command::Cone(a) => commands::cone(&scenario, a),
        Command::Map(a) => commands::map(&scenario, a),
        Command::Field(a) => commands::field(&scenario, a),
        Command::Sweep(a) => commands::sweep(&scenario, a),
    }?;
    let info = RunInfo {
        subcommand: cli.command.name(),
        flags: serde_json::to_value(cli).expect("flags serialize"),
        threads: rayon::current_num_threads(),
        seed: cli.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    for path in output::write_run(&cli.out, &scenario, &result.tables, info)? {
        log::info!("wrote {}", path.display());
    }
    Ok(result.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) => {
            eprintln!("cherenkov: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("cherenkov: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
