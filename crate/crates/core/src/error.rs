//! Error taxonomy shared by every module in the crate.

use thiserror::Error;

/// Errors produced by construction, decomposition, and pipeline operations.
///
/// Solver non-convergence is deliberately *not* an error: solvers report it
/// through their result type so that sweeps over hard instances can finish
/// and record diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on caller-supplied data or parameters was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operation is undefined for this input (e.g. the shape interaction
    /// matrix of a rank-0 matrix).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A matrix decomposition failed to converge or produced non-finite
    /// values.
    #[error("decomposition failure: {0}")]
    DecompositionFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
