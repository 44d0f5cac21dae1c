use thiserror::Error;

/// Errors raised by the tableau algebra, kernels, stepper and analyzers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in `{field}`: expected {expected}, found {found}")]
    Dimension {
        field: &'static str,
        expected: String,
        found: String,
    },

    #[error("singular matrix: {context}")]
    Singular { context: String },

    #[error("least-squares system for W is inconsistent (residual {residual:.3e})")]
    InconsistentW { residual: f64 },

    #[error("unsupported partition layout: {n_partitions} partitions with {n_stiff} stiff")]
    UnsupportedLayout { n_partitions: usize, n_stiff: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("QR iteration did not converge after {iterations} iterations on matrix {matrix}")]
    NoConvergence { iterations: usize, matrix: String },

    #[error("singular directional solve in family {family}, stage {stage}")]
    SingularStage { family: usize, stage: usize },

    #[error("missing reference trajectory for the starting procedure")]
    MissingReference,

    #[error("invalid method: {0}")]
    InvalidMethod(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("every convergence row is below the roundoff floor")]
    Saturated,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_err(field: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::Dimension {
        field,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
