use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    /// The series was truncated at `terms` without meeting its tolerance.
    /// `partial` is the sum accumulated so far and is usually still usable.
    #[error("series did not converge after {terms} terms (partial sum {partial:e})")]
    NonConvergence { terms: usize, partial: f64 },

    #[error("result unreliable: {0}")]
    Unreliable(String),

    #[error("node index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degenerate scope: {0}")]
    Degenerate(String),

    #[error("no transition: susceptibility curve is flat")]
    NoTransition,

    #[error("root finding failed: {0}")]
    RootNotFound(String),

    #[error("unknown figure id {0:?}")]
    UnknownFigure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl Error {
    /// Partial value carried by a non-convergence report, if any.
    pub fn partial(&self) -> Option<f64> {
        match self {
            Error::NonConvergence { partial, .. } => Some(*partial),
            _ => None,
        }
    }
}
