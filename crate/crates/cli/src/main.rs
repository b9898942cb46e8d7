//! `growthlab`: scenario-driven runs of the measure, mean-value, density and
//! verification routines. Output is CSV/JSON in `--out`.

mod commands;
mod error;
mod format;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Output, RunOptions, Which};
use error::CliError;

#[derive(Parser)]
#[command(name = "growthlab", version, about = "Growth functionals of atomic measures and subharmonic models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Multiplies the points-per-decade of every grid.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    grid_scale: u32,
    /// Seed for randomized property sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate l and breve-l of named measures.
    Measure(Common),
    /// Circle, disk and sup means of models.
    Avg(Common),
    /// Density estimates of interval functions.
    Density(Common),
    /// Verification checks.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        which: Which,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GROWTHLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Malformed(format!("GROWTHLAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (common, which) = match &cli.command {
        Command::Measure(c) | Command::Avg(c) | Command::Density(c) => (c, None),
        Command::Verify { common, which } => (common, Some(*which)),
    };
    let sc = scenario::load(&common.scenario)?;
    let opts = RunOptions {
        grid_scale: common.grid_scale as usize,
        seed: common.seed,
    };
    let mut out = Output::new(&common.out)?;
    let path = common.scenario.as_path();
    let result = match (&cli.command, which) {
        (Command::Measure(_), _) => commands::cmd_measure(&sc, path, &mut out, opts),
        (Command::Avg(_), _) => commands::cmd_avg(&sc, path, &mut out, opts),
        (Command::Density(_), _) => commands::cmd_density(&sc, path, &mut out, opts),
        (Command::Verify { .. }, Some(w)) => commands::cmd_verify(&sc, path, &mut out, opts, w),
        (Command::Verify { .. }, None) => unreachable!(),
    };
    if result.is_err() {
        out.cleanup();
    }
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("growthlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
