//! Command-line front-end for the qudit destruction toolkit.
//!
//! Exit codes are shared by every command: `0` success (or "equal"), `1` I/O,
//! parse or usage error, `2` semantically invalid input, `3` channels differ.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use qudit_destruction::ToleranceConfig;
use thiserror::Error;

pub mod commands;
pub mod display;
pub mod files;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO_OR_PARSE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_EQUAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    Semantic(#[from] qudit_destruction::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Semantic(_) => EXIT_INVALID,
            _ => EXIT_IO_OR_PARSE,
        }
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qudit-destroy", version, about = "Destruction-of-states channel toolkit for a vacuum-extended qudit")]
pub struct Cli {
    /// Override the entrywise equality tolerance (default 1e-10, at most 1e-6).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Output file (destroy: Kraus channel with --emit-kraus, otherwise the
    /// output state; demo-qubit: the channel).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a channel file and check complete positivity.
    Verify { channel: PathBuf },
    /// Apply the destruction channel for an observable and eigenvalue set.
    Destroy {
        #[arg(long)]
        observable: PathBuf,
        /// Comma-separated eigenvalues, e.g. "1,-1"; empty for no destruction.
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long)]
        state: PathBuf,
        /// Also emit the Kraus representation as a channel file.
        #[arg(long)]
        emit_kraus: bool,
    },
    /// Compare two channel files through their Choi matrices.
    Compare { a: PathBuf, b: PathBuf },
    /// Print the Choi matrix of a channel and its eigenvalues.
    Choi { channel: PathBuf },
    /// Qubit examples: i (Ω={1}), ii (Ω={-1}), iii (Ω={1,-1}).
    DemoQubit { case: String },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Cli {
    fn tolerances(&self) -> Result<ToleranceConfig, CliError> {
        match self.tolerance {
            None => Ok(ToleranceConfig::default()),
            Some(t) => ToleranceConfig::with_eq_tol(t).map_err(|e| CliError::Usage(e.to_string())),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_IO_OR_PARSE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut stdout = String::new();
    let result = cli
        .tolerances()
        .and_then(|tol| commands::dispatch(&cli, &tol, &mut stdout));
    match result {
        Ok(code) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout,
            stderr: format!("error: {e}\n"),
        },
    }
}
