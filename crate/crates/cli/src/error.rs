//! CLI error type and the exit-code contract.
//!
//! Every failure is classified as either a validation problem (bad flags,
//! malformed or inconsistent data, numerical failure on degenerate input) or
//! an I/O problem (missing files, unreadable/unwritable paths). The process
//! exit code is stable across subcommands: 0 on success, 2 for validation,
//! 3 for I/O.

use std::fmt;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Invalid arguments, malformed input data, or a solver failure caused
    /// by the data itself. Exit code 2.
    Validation(String),
    /// Filesystem problems: missing, unreadable, or unwritable paths.
    /// Exit code 3.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "error: {msg}"),
            CliError::Io(msg) => write!(f, "I/O error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<subseg_core::Error> for CliError {
    fn from(err: subseg_core::Error) -> Self {
        // Core errors all describe problems with the data or parameters the
        // user handed us, so they map to the validation exit code.
        CliError::Validation(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Shorthand for wrapping `std::io` failures with the offending path.
pub fn io_err(path: &std::path::Path, err: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {err}", path.display()))
}
