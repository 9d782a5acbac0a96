//! Library side of the `dpimpute` binary: argument types, subcommand bodies,
//! output files and the boxplot renderer.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::fmt;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed configuration, arguments or input data (exit 1).
    Invalid(String),
    /// Reading or writing files failed (exit 2).
    Io(String),
    /// Nothing could be computed: every run failed or no response is observed (exit 3).
    NoResult(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
            CliError::NoResult(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::NoResult(m) => write!(f, "no result: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dpimpute::Error> for CliError {
    fn from(e: dpimpute::Error) -> Self {
        use dpimpute::Error as E;
        match &e {
            E::Io(_) => CliError::Io(e.to_string()),
            E::Csv(c) if c.is_io_error() => CliError::Io(e.to_string()),
            E::NoObservedResponses
            | E::TooFewCompleteCases { .. }
            | E::IrrecoverablePerturbation { .. }
            | E::DegenerateDesign(_) => CliError::NoResult(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
