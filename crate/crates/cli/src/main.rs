//! `gbc-tin`: rate regions, constant-gap scans and figure data for superimposed
//! PAM over the two-user Gaussian broadcast channel.

// `!(x > 0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{GapScanArgs, MiArgs};
use config::CommonArgs;

#[derive(Debug, Parser)]
#[command(name = "gbc-tin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Achievable rate points, Pareto frontier and capacity boundary.
    Region(CommonArgs),
    /// Certify the constant-gap bounds over an SNR grid; exits 1 on any violation.
    GapScan(GapScanArgs),
    /// User 2's rate against C2(alpha) for (5,2), (4,2) and (3,3).
    Fig5(CommonArgs),
    /// Recompute the closed-form gap constants.
    Constants,
    /// Mutual information at a single operating point.
    Mi(MiArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Region(a) => commands::region(a),
        Command::GapScan(a) => commands::gap_scan(a),
        Command::Fig5(a) => commands::fig5(a),
        Command::Constants => commands::constants(),
        Command::Mi(a) => commands::mi(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
