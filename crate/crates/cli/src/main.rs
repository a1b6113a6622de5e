//! `tricoul` command-line front end: point evaluation, ray scans and self-tests.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{read_config_file, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] tricoul::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariant(_) | CliError::Core(tricoul::Error::PoorFit(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "tricoul", version, about = "Three-body Coulomb asymptotic eigenfunctions and their residuals")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every construction, the weights, the potential and both residuals at one point.
    Eval(RunArgs),
    /// Scan residual magnitudes along a ray and fit their decay exponents.
    Rayscan(RunArgs),
    /// Run the special-function and wave-function invariant suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Plain-text key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Momentum in the pair-1 frame: kx,ky,kz,px,py,pz.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    /// Configuration in the pair-1 frame: x1,x2,x3,y1,y2,y3.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// linear, screen or overlap.
    #[arg(long)]
    ray: Option<String>,
    #[arg(long = "ray-dir", allow_hyphen_values = true)]
    ray_dir: Option<String>,
    #[arg(long = "ray-offset", allow_hyphen_values = true)]
    ray_offset: Option<String>,
    #[arg(long = "ray-pair")]
    ray_pair: Option<String>,
    #[arg(long = "ray-scale")]
    ray_scale: Option<String>,
    #[arg(long = "t-min")]
    t_min: Option<String>,
    #[arg(long = "t-max")]
    t_max: Option<String>,
    #[arg(long = "t-samples")]
    t_samples: Option<String>,
    /// Fixed finite-difference step, replacing the adaptive rule.
    #[arg(long)]
    step: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long = "allow-small-k")]
    allow_small_k: bool,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long = "inject-norm-fault", hide = true, default_value_t = 0.0)]
    inject_norm_fault: f64,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut map = match &self.config {
            Some(p) => read_config_file(p)?,
            None => Default::default(),
        };
        let flags = [
            ("alpha", &self.alpha),
            ("q", &self.q),
            ("mu", &self.mu),
            ("nu", &self.nu),
            ("z", &self.z),
            ("ray", &self.ray),
            ("ray-dir", &self.ray_dir),
            ("ray-offset", &self.ray_offset),
            ("ray-pair", &self.ray_pair),
            ("ray-scale", &self.ray_scale),
            ("t-min", &self.t_min),
            ("t-max", &self.t_max),
            ("t-samples", &self.t_samples),
            ("step", &self.step),
            ("out", &self.out),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        if self.allow_small_k {
            map.insert("allow-small-k".into(), "true".into());
        }
        RunConfig::from_map(&map)
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("TRICOUL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("TRICOUL_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.cmd {
        Command::Eval(a) => commands::cmd_eval(&a.resolve()?),
        Command::Rayscan(a) => commands::cmd_rayscan(&a.resolve()?),
        Command::Selftest(a) => commands::cmd_selftest(a.inject_norm_fault),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tricoul: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
