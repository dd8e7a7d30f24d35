//! `evokit`: config-driven batch runner for evolutionary-computation
//! experiments. Reads TOML experiment files, executes seeded batches,
//! and leaves traces and summaries on disk for scripts to pick up. No
//! environment variables are consulted; flags are the whole interface.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "evokit", version, about = "Batch runner for evolutionary-computation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config as a seeded batch and write traces plus a summary.
    Run {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory; created if missing. Default: out
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's base seed; run i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's run count.
        #[arg(long)]
        runs: Option<usize>,
        /// Suppresses per-run and aggregate lines on stdout.
        #[arg(long)]
        quiet: bool,
    },
    /// Run two configs on the same problem and report a Welch t-test.
    Compare {
        /// First config (TOML).
        #[arg(long)]
        a: PathBuf,
        /// Second config (TOML).
        #[arg(long)]
        b: PathBuf,
        /// Overrides both configs' run counts.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Run a config once per grid point and tabulate the summaries.
    Sweep {
        /// Base experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Grid file: dotted config keys mapping to value lists (TOML).
        #[arg(long)]
        grid: PathBuf,
        /// Output directory for sweep.csv; created if missing. Default: out
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, runs, quiet } => {
            commands::cmd_run(&config, out, seed, runs, quiet)
        }
        Command::Compare { a, b, runs } => commands::cmd_compare(&a, &b, runs),
        Command::Sweep { config, grid, out } => commands::cmd_sweep(&config, &grid, out),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.code());
    }
}
