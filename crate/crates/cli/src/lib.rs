//! Command-line front end: JSON config ingestion, subcommand dispatch,
//! and CSV/JSON result emission.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical error
//! (e.g. no steady state), 64 usage error.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical: {msg}"),
            CliError::Io(msg) => write!(f, "io: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "optomech",
    version,
    about = "Steady-state entanglement and EPR steering of a squeezed coupled-resonator optomechanical model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the steady state and report nonlocality for one mode pair.
    Steady {
        #[arg(long)]
        config: PathBuf,
        /// Mode pair like a2-b.
        #[arg(long)]
        pair: Option<String>,
        /// Also write the JSON report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the covariance in time and write a trace CSV.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Horizon in units of 1/omega_m.
        #[arg(long = "t-max")]
        t_max: f64,
        /// Keep every STRIDE-th integration step.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pair: Option<String>,
    },
    /// Scan 1 or 2 parameter axes and write a grid CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Axis spec NAME=MIN:MAX:COUNT[:log]; repeat for two axes.
        #[arg(long = "axis")]
        axes: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pair: Option<String>,
    },
    /// Run a named figure recipe (fig2..fig7, or a panel like fig4a).
    Figure {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the oracle suite and print one report line each.
    Oracles {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Entry point shared by `main` and the tests; returns the exit code.
pub fn run<W: Write>(args: &[String], stdout: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            eprint!("{e}");
            return EXIT_USAGE;
        }
    };
    let started = std::time::Instant::now();
    let result = match &cli.command {
        Command::Steady { config, pair, out } => {
            commands::cmd_steady(stdout, config, pair.as_deref(), out.as_deref())
        }
        Command::Evolve {
            config,
            t_max,
            stride,
            out,
            pair,
        } => commands::cmd_evolve(stdout, config, *t_max, *stride, out, pair.as_deref()),
        Command::Sweep {
            config,
            axes,
            out,
            pair,
        } => commands::cmd_sweep(stdout, config, axes, out, pair.as_deref()),
        Command::Figure { name, out } => commands::cmd_figure(stdout, name, out),
        Command::Oracles { seed } => commands::cmd_oracles(stdout, *seed),
    };
    match result {
        Ok(()) => {
            eprintln!("done in {:.3}s", started.elapsed().as_secs_f64());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
