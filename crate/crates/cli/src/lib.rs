//! Command-line front end: `cmc-lab <command> [--config file] [flags]`.
//!
//! Commands are `solve`, `verify`, `catalog`, `predicates` and `sweep`. The
//! configuration is TOML (see [`config::RunConfig`]); flags override keys of
//! the file. Exit codes: 0 success, 2 failure predicted by the solvability
//! predicates, 1 any other failure, 3 configuration error. Errors are printed
//! as a single `error kind=… reason=…` line on stderr.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod spec;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use cmc_core::Signature;

use config::{Command, Overrides, RunConfig};
use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "cmc-lab", version, about = "Constant-mean-curvature Dirichlet laboratory")]
struct Args {
    /// Command to run; may instead come from the `command` key of the config.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid spacing.
    #[arg(long = "h")]
    h: Option<f64>,
    /// Mean curvature.
    #[arg(long = "H", allow_hyphen_values = true)]
    mean_curvature: Option<f64>,
    #[arg(long, value_parser = parse_signature)]
    signature: Option<Signature>,
    /// Domain spec, e.g. `unit_disk`, `star(1, 0.3, 5)`, `rectangle(2, 1)`.
    #[arg(long)]
    domain: Option<String>,
    /// Boundary data spec: `zero`, `constant(c)` or `affine(a, b, c)`.
    #[arg(long)]
    boundary_data: Option<String>,
    /// Worker threads for `sweep`.
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_signature(s: &str) -> Result<Signature, String> {
    match s {
        "euclid" | "+1" | "1" => Ok(Signature::Euclidean),
        "lorentz" | "-1" => Ok(Signature::Lorentzian),
        other => Err(format!("expected `euclid` or `lorentz`, got `{other}`")),
    }
}

/// Builds the effective configuration from the file and flags.
fn effective_config(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        command: args.command,
        out: args.out.clone(),
        h: args.h,
        mean_curvature: args.mean_curvature,
        signature: args.signature,
        domain: args.domain.clone(),
        jobs: args.jobs,
        boundary_data: args.boundary_data.clone(),
    });
    cfg.validate()?;
    Ok(cfg)
}

pub fn run_config(cfg: &RunConfig) -> Result<i32, CliError> {
    match cfg.command.expect("validated config has a command") {
        Command::Solve => commands::solve(cfg),
        Command::Verify => commands::verify(cfg),
        Command::Catalog => commands::catalog(cfg),
        Command::Predicates => commands::predicates_cmd(cfg),
        Command::Sweep => commands::sweep(cfg),
    }
}

/// Parses arguments, runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return exit::OK;
            }
            eprintln!("{}", CliError::Config(e.to_string().lines().next().unwrap_or("").to_string()).line());
            return exit::CONFIG;
        }
    };
    match effective_config(&args).and_then(|cfg| run_config(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}
