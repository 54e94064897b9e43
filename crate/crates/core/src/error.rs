use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cutoff too small: n_ph = {n_ph} but the initial state needs {required} photons")]
    CutoffTooSmall { n_ph: u32, required: u32 },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("krylov step did not reach tol {tol:e} (step {step:e}, estimate {estimate:e})")]
    NonConvergence { tol: f64, step: f64, estimate: f64 },

    #[error("operator is not hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("expectation value has imaginary part {0:e}")]
    ComplexExpectation(f64),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("degenerate trace: {0}")]
    DegenerateTrace(&'static str),

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("conflict: {0}")]
    Conflict(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 3,
            Error::Parse { .. }
            | Error::UnknownKey(_)
            | Error::Validation { .. }
            | Error::Conflict(_)
            | Error::InvalidParameter { .. }
            | Error::CutoffTooSmall { .. }
            | Error::InvalidSplit(_) => 1,
            _ => 2,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::CutoffTooSmall { .. } => "cutoff",
            Error::InvalidParameter { .. } | Error::Validation { .. } => "validation",
            Error::DimensionMismatch { .. } => "dimension",
            Error::NonConvergence { .. } => "non-convergence",
            Error::NotHermitian(_) | Error::ComplexExpectation(_) => "numeric",
            Error::InvalidSplit(_) => "split",
            Error::DegenerateTrace(_) | Error::DegenerateFit(_) => "degenerate",
            Error::Parse { .. } => "parse",
            Error::UnknownKey(_) => "unknown-key",
            Error::Conflict(_) => "conflict",
            Error::Io(_) | Error::Csv(_) => "io",
            Error::ThreadPool(_) => "runtime",
        }
    }
}
