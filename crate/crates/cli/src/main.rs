//! `fdrelay`: parameter sweeps and single-realization reports.

mod config;
mod single;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdrelay::alpha::JointMethod;
use fdrelay::Scheme;

use config::{Overrides, Scenario};
use single::{McRequest, OpaRequest};
use sweep::{Engine, Family, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] fdrelay::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "fdrelay", version, about = "Wireless-powered full-duplex MIMO relay analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a parameter sweep as CSV.
    Sweep(SweepArgs),
    /// Beamformers and SINRs on one seeded channel draw.
    Beamform(SingleArgs),
    /// Optimal time split on one seeded channel draw.
    Alpha(AlphaArgs),
    /// Outage probability.
    Outage(OutageArgs),
    /// Delay-constrained and ergodic throughput.
    Throughput(ThroughputArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "analytic")]
    engine: Engine,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated scheme names; an empty list writes only the header.
    #[arg(long, default_value = "opt,tzf,rzf,mrc")]
    scheme: String,
    /// `lo:hi:step` or a comma-separated list (α, P_S in dBm, or LI in dBm).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Time split for the outage family.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SingleArgs {
    #[arg(long)]
    scheme: Scheme,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Alternating,
    LineSearch,
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long)]
    scheme: Scheme,
    /// Joint search used for the optimum scheme.
    #[arg(long, default_value = "alternating")]
    method: Method,
    /// Optimize the harvesting/information power split as well.
    #[arg(long)]
    opa: bool,
    /// Peak source power for `--opa`.
    #[arg(long, default_value_t = 26.0, allow_hyphen_values = true)]
    p_max_dbm: f64,
    #[arg(long, default_value_t = 100)]
    opa_grid: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OutageArgs {
    #[arg(long)]
    scheme: Scheme,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// SINR threshold (linear); defaults to 2^R_c − 1.
    #[arg(long)]
    gamma_th: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ThroughputArgs {
    #[arg(long)]
    scheme: Scheme,
    /// Fixed time split; optimized when omitted.
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    common: Common,
}

impl Common {
    fn mc(&self) -> McRequest {
        McRequest { engine: self.engine, trials: self.trials, seed: self.seed }
    }
}

fn parse_schemes(text: &str) -> Result<Vec<Scheme>, CliError> {
    let mut out: Vec<Scheme> = Vec::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let s: Scheme = name.parse().map_err(|e: fdrelay::Error| CliError::Usage(e.to_string()))?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

fn emit(report: single::Report) -> Result<(), CliError> {
    io::stdout().write_all(report.render().as_bytes()).map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(a) => {
            if a.common.trials == 0 {
                return Err(CliError::Usage("--trials must be positive".into()));
            }
            let scenario = Scenario::load(&a.common.overrides)?;
            let spec = SweepSpec {
                family: a.family,
                grid: match &a.grid {
                    Some(g) => sweep::parse_grid(g)?,
                    None => sweep::default_grid(a.family),
                },
                schemes: parse_schemes(&a.scheme)?,
                engine: a.common.engine,
                n_trials: a.common.trials,
                seed: a.common.seed,
                alpha: a.alpha,
            };
            let rows = sweep::run_sweep(&spec, &scenario)?;
            match &a.out {
                Some(path) => {
                    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    sweep::write_csv(&rows, BufWriter::new(f))
                }
                None => sweep::write_csv(&rows, io::stdout().lock()),
            }
        }
        Command::Beamform(a) => {
            let cfg = Scenario::load(&a.common.overrides)?.system()?;
            emit(single::beamform(a.scheme, &cfg, a.alpha, a.common.seed)?)
        }
        Command::Alpha(a) => {
            let cfg = Scenario::load(&a.common.overrides)?.system()?;
            let method = match a.method {
                Method::Alternating => JointMethod::Alternating,
                Method::LineSearch => JointMethod::LineSearch,
            };
            let opa = a.opa.then_some(OpaRequest { p_max_dbm: a.p_max_dbm, grid: a.opa_grid });
            emit(single::alpha(a.scheme, &cfg, a.common.seed, method, opa)?)
        }
        Command::Outage(a) => {
            let cfg = Scenario::load(&a.common.overrides)?.system()?;
            let g = a.gamma_th.unwrap_or_else(|| cfg.gamma_th());
            emit(single::outage(a.scheme, &cfg, a.alpha, g, &a.common.mc())?)
        }
        Command::Throughput(a) => {
            let cfg = Scenario::load(&a.common.overrides)?.system()?;
            emit(single::throughput(a.scheme, &cfg, a.alpha, &a.common.mc())?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
