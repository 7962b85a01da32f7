use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points {i} and {j} coincide")]
    CoincidentPoints { i: usize, j: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("secant set is empty: a cloud needs at least two points")]
    EmptySecants,

    #[error("{stage}: search failed, best epsilon {epsilon:e} below threshold")]
    SearchFailure {
        stage: String,
        best: Vec<f64>,
        epsilon: f64,
    },

    #[error("map collapses points {i} and {j}")]
    NonInjective { i: usize, j: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: f64 },

    #[error("contact exponent of a branch with itself is undefined")]
    UndefinedContact,

    #[error("germs are not outer Lipschitz equivalent: {0}")]
    NotEquivalent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) => 1,
            Error::SearchFailure { .. } => 3,
            Error::NotEquivalent(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn staged(self, stage: &str) -> Self {
        match self {
            Error::SearchFailure {
                stage: inner,
                best,
                epsilon,
            } => Error::SearchFailure {
                stage: format!("{stage}/{inner}"),
                best,
                epsilon,
            },
            Error::Precondition(msg) => Error::Precondition(format!("{stage}: {msg}")),
            other => other,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
