use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Raised by an LMO when its input is (numerically) zero. Solvers treat it
    /// as a signal and fall back to a previously computed atom.
    #[error("linear minimization oracle received a zero gradient")]
    ZeroGradient,

    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("constraint is inactive at the unconstrained minimizer")]
    InactiveConstraint,

    #[error("operation not supported for constraint {0}")]
    UnsupportedConstraint(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input at line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("duplicate observed entry ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("index ({row}, {col}) out of range for shape ({rows}, {cols})")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("label {0} is not +1 or -1")]
    InvalidLabel(f64),

    #[error("all mapped labels are identical")]
    DegenerateLabels,

    #[error("non-positive optimality gap {value} at k = {k}")]
    NonPositiveGap { k: usize, value: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the input data rather than the configuration.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedLine { .. }
                | Error::DuplicateEntry { .. }
                | Error::IndexOutOfRange { .. }
                | Error::InvalidLabel(_)
                | Error::DegenerateLabels
                | Error::Io { .. }
        )
    }
}
