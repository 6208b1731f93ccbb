//! `dwlab`: λ scans, ground-state spectra, finite-size scaling fits and the
//! mean-field bifurcation of bosons in a tilted double well.
//!
//! Exit status is 0 on success, 2 on a usage error and 3 on a numerical
//! failure. `DWLAB_THREADS` caps the number of worker threads.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "dwlab",
    version,
    about = "Tilted double-well Bose-Hubbard toolkit"
)]
struct Cli {
    /// Suppress progress messages on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Observables on a uniform λ grid.
    Scan(commands::scan::ScanArgs),
    /// Ground-state weights |c_k|² at selected λ.
    Spectrum(commands::spectrum::SpectrumArgs),
    /// Peak tables and log-log fits across particle numbers.
    Scaling(commands::scaling::ScalingArgs),
    /// Mean-field minimum z_min(λ) and the critical coupling.
    Semiclassical(commands::semiclassical::SemiclassicalArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("DWLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "DWLAB_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Scan(args) => commands::scan::run(&args, cli.quiet),
        Command::Spectrum(args) => commands::spectrum::run(&args, cli.quiet),
        Command::Scaling(args) => commands::scaling::run(&args, cli.quiet),
        Command::Semiclassical(args) => commands::semiclassical::run(&args, cli.quiet),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap reports usage errors with status 2 and help/version with 0.
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dwlab: {e}");
            e.exit_code()
        }
    }
}
