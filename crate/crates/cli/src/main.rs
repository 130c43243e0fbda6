//! `subseg` — subspace segmentation from the command line.
//!
//! Subcommands: `generate`, `cluster`, `denoise`, `verify`, `sweep`. See
//! `subseg --help` and the per-command help for flags; every run is fully
//! determined by its arguments, config file, and seeds.

mod args;
mod commands;
mod config;
mod error;
mod io;
mod plot;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, Result};

fn main() {
    // clap exits on its own for parse errors (code 2) and --help/--version
    // (code 0), matching the validation exit-code contract.
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}

fn run(cli: &Cli) -> i32 {
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Generate(a) => commands::cmd_generate(a),
        Command::Cluster(a) => commands::cmd_cluster(a),
        Command::Denoise(a) => commands::cmd_denoise(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Applies the `SUBSEG_THREADS` cap to the global worker pool. Unset or `0`
/// leaves the machine default; anything unparseable is a validation error.
/// Results never depend on the thread count — only throughput does.
fn configure_threads() -> Result<()> {
    let raw = match std::env::var("SUBSEG_THREADS") {
        Ok(v) => v,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(CliError::Validation(
                "SUBSEG_THREADS must be a non-negative integer".into(),
            ))
        }
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        CliError::Validation(format!(
            "SUBSEG_THREADS must be a non-negative integer, got {raw:?}"
        ))
    })?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Validation(format!("failed to configure thread pool: {e}")))?;
    }
    Ok(())
}
