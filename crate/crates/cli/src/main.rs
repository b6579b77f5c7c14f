//! `genalg`: verification, tabulation, normal ordering and ensemble solving
//! for the generalized oscillator algebras.
//!
//! Exit codes: 0 success, 1 a verified identity failed, 2 usage or parse
//! error, 3 infeasible targets, 4 solver did not converge.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use format::OutputFormat;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_NO_CONVERGENCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "genalg", version, about = "Generalized Fermion/Boson oscillator algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the defining and common relations for a range of orders.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 18)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Tabulate the occupancy next to the Fermi and Bose functions.
    #[command(allow_negative_numbers = true)]
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x_min: f64,
        #[arg(long)]
        x_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Reduce an expression in `e` and `e+` to creators-left normal form.
    NormalOrder {
        #[arg(long)]
        n: usize,
        /// Expression, e.g. "[e, e+] - 1"
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Solve for the Lagrange factors of a level spectrum.
    #[command(allow_negative_numbers = true)]
    Ensemble {
        #[arg(long)]
        n: usize,
        /// Table with header `energy,degeneracy`
        #[arg(long)]
        levels: PathBuf,
        #[arg(long)]
        particles: f64,
        #[arg(long)]
        energy: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let code = match cli.command {
        Command::Verify {
            n_min,
            n_max,
            tol,
            format,
        } => commands::verify(n_min, n_max, tol, format),
        Command::Table {
            n,
            x_min,
            x_max,
            steps,
            format,
        } => commands::table(n, x_min, x_max, steps, format),
        Command::NormalOrder { n, expr, format } => commands::normal_order(n, &expr, format),
        Command::Ensemble {
            n,
            levels,
            particles,
            energy,
            tol,
            format,
        } => commands::ensemble(n, &levels, particles, energy, tol, format),
    };
    ExitCode::from(code)
}
