use thiserror::Error;

use crate::omega::OmegaExpression;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{context}: row {row} sums to {sum}, expected 1 (tolerance 1e-9)")]
    RowSum {
        context: String,
        row: usize,
        sum: f64,
    },

    #[error("{context}: entry ({row}, {col}) = {value} is not a probability")]
    InvalidEntry {
        context: String,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    /// An omega node was applied to an expression whose boolean matrix is not idempotent.
    /// `repair_exponent` is the smallest `e` such that `(expression^e)^w` is well-typed.
    #[error(
        "`{expression}` is not idempotent; try `({expression})^{repair_exponent}` under the omega"
    )]
    NotIdempotent {
        expression: Box<OmegaExpression>,
        repair_exponent: usize,
    },

    #[error(
        "factorial powers did not converge after k = {k_max} (last distance {last_distance:e})"
    )]
    NonConvergence { k_max: u32, last_distance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid automaton: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
