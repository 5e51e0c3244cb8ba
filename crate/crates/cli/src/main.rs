//! `nsv`: run simulations, experiments and verification suites.
//!
//! Exit codes: 0 on success, 1 for unreadable or invalid input (including
//! unknown suite names), 2 when a run fails or a verification check fails.
//! Every run writes `manifest.json` to the output directory.

mod commands;
mod manifest;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Context;
use manifest::Manifest;

#[derive(Debug, Parser)]
#[command(name = "nsv", version, about = "Spectral solver for power-law Navier-Stokes-Voigt flows")]
struct Cli {
    /// Directory for ledgers, tables and the manifest.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,

    /// Worker threads for experiment sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for random fields; replaces seeds given in config files.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the configuration and write the energy ledger.
    Simulate { config: PathBuf },
    /// Run an invariant suite: tensor, spectral, energy or pressure.
    Verify { suite: String },
    /// Run an experiment spec and write its table.
    Experiment { spec: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }

    let ctx = Context {
        out_dir: cli.output_dir.clone(),
        seed: cli.seed,
    };
    let (name, input) = match &cli.command {
        Command::Simulate { config } => ("simulate", config.display().to_string()),
        Command::Verify { suite } => ("verify", suite.clone()),
        Command::Experiment { spec } => ("experiment", spec.display().to_string()),
    };
    let mut manifest = Manifest::new(name, &input, cli.threads, cli.seed);
    let start = Instant::now();
    let result = match &cli.command {
        Command::Simulate { config } => commands::simulate(config, &ctx, &mut manifest),
        Command::Verify { suite } => commands::verify(suite, &ctx, &mut manifest),
        Command::Experiment { spec } => commands::experiment(spec, &ctx, &mut manifest),
    };
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    let code = match &result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    };
    manifest.finish(result.err());
    if let Err(e) = manifest.write(&ctx.out_dir) {
        eprintln!("error: cannot write manifest: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
