//! `semion`: batch front end. One TOML config in, one structured result out.
//!
//! Exit status: 0 when every verdict passes, 1 when a verdict fails, 2 on
//! configuration or capacity errors. Results go to `--out` or stdout; the
//! one-line summary goes to stderr.

mod commands;
mod config;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::RunOptions;
use crate::config::load;
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "semion", version, about = "Mutual-semion lattice and circuit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Largest honeycomb site count handled by dense diagonalization.
    #[arg(long, global = true)]
    dense_limit: Option<usize>,

    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Layout: sites, ranks, plaquettes, chains.
    Lattice,
    /// Eigenvalues and equivalence with the fermion oracle.
    Spectrum,
    /// Projected ground state: vortex map and energy checks.
    Ground,
    /// Braid phase of a loop around a string, operator and state level.
    Braid,
    /// Cavity-controlled string check and interferometric readout.
    Qnd,
    /// Circuit couplings and diagnostics.
    Circuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn run(cli: &Cli) -> Result<Report> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| anyhow::anyhow!("--config <path> is required"))?;
    let opts = RunOptions {
        dense_limit: cli.dense_limit,
        seed: cli.seed,
    };
    match cli.command {
        Command::Lattice => commands::run_lattice(&load(path)?),
        Command::Spectrum => commands::run_spectrum(&load(path)?, &opts),
        Command::Ground => commands::run_ground(&load(path)?, &opts),
        Command::Braid => commands::run_braid(&load(path)?),
        Command::Qnd => commands::run_qnd(&load(path)?, &opts),
        Command::Circuit => commands::run_circuit(&load(path)?),
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    match cli.format {
        Format::Json => report.write_json(&mut out)?,
        Format::Csv => report.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli).and_then(|r| emit(&cli, &r).map(|()| r)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let passed = report.verdicts.iter().filter(|v| v.passed).count();
    eprintln!("{}: {passed}/{} verdicts passed", report.command, report.verdicts.len());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
