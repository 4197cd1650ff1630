//! `qcasino`: evaluate, plot, solve and simulate the two-desk spin-½ game.
//!
//! Exit codes: 0 ok, 2 usage or malformed input, 3 non-finite numbers,
//! 4 I/O failure, 5 equilibrium refinement did not converge.

mod commands;
mod output;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcasino_core::equilibrium::{DEFAULT_GRID, DEFAULT_TOL};

use commands::Player;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
    Convergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
            CliError::Convergence(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Numeric(m)
            | CliError::Io(m)
            | CliError::Convergence(m) => m,
        }
    }
}

impl From<qcasino_core::Error> for CliError {
    fn from(e: qcasino_core::Error) -> Self {
        match e {
            qcasino_core::Error::NonFinite(_) | qcasino_core::Error::NonHermitian { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qcasino",
    version,
    about = "Two-desk spin-1/2 quantum game toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Payoff at a strategy pair, split by desk, with the operator cross-check
    Eval {
        /// JSON game file
        #[arg(long)]
        spec: PathBuf,
        /// Alice's state angle in radians
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Bob's state angle in radians
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
    },
    /// Sample a player's constraint curve as CSV (alpha, p1, p2)
    Curve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        player: Player,
        /// Number of samples over [0, pi)
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a saddle point of the payoff surface
    Equilibrium {
        #[arg(long)]
        spec: PathBuf,
        /// Points per axis of the coarse grid
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Convergence tolerance for refinement
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Build and solve the equivalent 4x4 classical matrix game
    Classical {
        #[arg(long)]
        spec: PathBuf,
        /// Label payoffs with c1<->c3 and c2<->c4 swapped
        #[arg(long)]
        table1_labels: bool,
        /// Also write the matrix as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Play both desks repeatedly with a seeded generator
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stream round,payoff,running_mean rows to this CSV file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    match cli.command {
        Command::Eval { spec, alpha, beta } => commands::eval(&spec, alpha, beta),
        Command::Curve {
            spec,
            player,
            n,
            out,
        } => commands::curve(&spec, player, n, out.as_deref()),
        Command::Equilibrium { spec, grid, tol } => commands::equilibrium(&spec, grid, tol),
        Command::Classical {
            spec,
            table1_labels,
            csv,
        } => commands::classical(&spec, table1_labels, csv.as_deref()),
        Command::Simulate {
            spec,
            alpha,
            beta,
            rounds,
            seed,
            trace,
        } => commands::simulate(&spec, alpha, beta, rounds, seed, trace.as_deref()),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("qcasino: {}", e.message());
    ExitCode::from(e.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // help and version exit 0, everything else 2
        Err(e) => e.exit(),
    };
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout
        .write_all(outcome.report.as_bytes())
        .and_then(|_| stdout.flush())
    {
        return fail(&CliError::Io(format!("cannot write output: {e}")));
    }
    match outcome.error {
        Some(e) => fail(&e),
        None => ExitCode::SUCCESS,
    }
}
