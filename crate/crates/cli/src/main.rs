//! `annulus`: command-line front end.
//!
//! Every command prints (or writes with `--json`) one JSON document with the
//! keys `command, params, order, results, tail_bounds, checks`. Exit status is
//! 0 when all checks pass, 1 on a failed check or rejected input, 2 on a usage
//! error.

mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Config;

#[derive(Debug, Parser)]
#[command(name = "annulus", version, about = "Two-boundary loop model on the annulus")]
pub struct Cli {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write CSV data here (a directory for `perco`).
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Either the seven weights or the seven Coulomb-gas parameters.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub n1: Option<f64>,
    #[arg(long)]
    pub n2: Option<f64>,
    #[arg(long)]
    pub n12: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub r12: Option<f64>,
    #[arg(long)]
    pub chi: Option<f64>,
    #[arg(long)]
    pub u1: Option<f64>,
    #[arg(long)]
    pub u2: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Truncation order: terms up to `q^order` are kept.
    #[arg(long)]
    pub order: Option<u32>,
    /// Modular parameter for the numeric evaluation, `q = exp(-pi tau)`.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Compare against minimal-model characters, e.g. `rocha:1,3` or `rocha:1,3+3,3`.
    #[arg(long)]
    pub check: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Two,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Trace,
    Lattice,
    Relations,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between loop weights and Coulomb-gas parameters.
    Params(ParamArgs),
    /// Two-boundary partition function as a q-series.
    Ztwo {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// One-boundary partition function.
    Zone {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        u1: Option<f64>,
        #[arg(long)]
        chi: Option<f64>,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Potts-model partition function with restricted boundary spins.
    Zpotts {
        #[arg(long = "Q")]
        q: Option<f64>,
        #[arg(long = "Q1")]
        q1: Option<f64>,
        #[arg(long = "Q2")]
        q2: Option<f64>,
        #[arg(long = "Q12")]
        q12: Option<f64>,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Refined percolation crossing probabilities.
    Perco {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Probability that a cluster connects the two rims.
    Crossing {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Finite-size scaling of the strip free energy.
    Fss {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        r1: Option<f64>,
        /// Defaults to r1.
        #[arg(long)]
        r2: Option<f64>,
        #[arg(long)]
        r12: Option<f64>,
        #[arg(long)]
        nmin: Option<usize>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, value_enum)]
        boundary: Option<BoundaryArg>,
    },
    /// Spectra of the diagram and spin-chain Hamiltonians.
    Spectrum {
        /// Number of sites.
        #[arg(long)]
        n: Option<usize>,
        /// Sets gamma = pi/(m+1) unless --gamma is given.
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        r2: Option<f64>,
        #[arg(long)]
        s1: Option<f64>,
        #[arg(long)]
        s2: Option<f64>,
        #[arg(long)]
        phi1: Option<f64>,
        #[arg(long)]
        phi2: Option<f64>,
    },
    /// Seeded verification suites; writes a pass/fail CSV table.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        opts: VerifyArgs,
    },
    /// Same as `verify --suite trace`.
    #[command(name = "verify-trace")]
    VerifyTrace {
        #[command(flatten)]
        opts: VerifyArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Strand count; defaults to cycling through the suite's sizes.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random cases.
    #[arg(long)]
    pub count: Option<usize>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
}

impl From<annulus::Error> for CliError {
    fn from(e: annulus::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("ANNULUS_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("ANNULUS_THREADS must be a positive integer, got {v:?}"))),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    annulus::par::init_threads(threads_from_env()?);
    let cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(CliError::Usage)?,
        None => Config::default(),
    };
    let out = commands::dispatch(&cli.command, &cfg)?;
    out.write(cli.json.as_deref(), cli.csv.as_deref())?;
    Ok(out.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
