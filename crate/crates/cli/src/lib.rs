//! Command-line front end: `smile`, `triangle`, `density`, `mc-check` and
//! `table1`, each writing one CSV or JSON table.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};

use clap::{Parser, Subcommand};

pub use config::{CommonArgs, Format, FormulaChoice, RunConfig};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "sabr",
    version,
    about = "SABR small-maturity smile asymptotics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Implied vols on a strike grid.
    Smile(CommonArgs),
    /// Prices of the triangle put spread over a range of peaks.
    Triangle(CommonArgs),
    /// Finite-difference risk-neutral density of the smile.
    Density(CommonArgs),
    /// Formula vols against a Monte Carlo simulation of the model.
    McCheck(CommonArgs),
    /// Seeded comparison of the two zero-order terms in four regimes.
    Table1(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Smile(a)
            | Command::Triangle(a)
            | Command::Density(a)
            | Command::McCheck(a)
            | Command::Table1(a) => a,
        }
    }
}

/// Runs one command, writing the table to `--out` (or `stdout`) and
/// warnings to `stderr`. The table is written before an out-of-band error
/// is returned.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::resolve(cli.command.args())?;
    let report = match &cli.command {
        Command::Smile(_) => commands::cmd_smile(&cfg)?,
        Command::Triangle(_) => commands::cmd_triangle(&cfg)?,
        Command::Density(_) => commands::cmd_density(&cfg)?,
        Command::McCheck(_) => commands::cmd_mc_check(&cfg)?,
        Command::Table1(_) => commands::cmd_table1(&cfg)?,
    };
    for w in &report.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    match &cfg.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            report.table.write(&mut w, cfg.format)?;
            w.flush()?;
        }
        None => report.table.write(stdout, cfg.format)?,
    }
    if report.out_of_band > 0 {
        return Err(CliError::OutOfBand(report.out_of_band));
    }
    Ok(())
}
