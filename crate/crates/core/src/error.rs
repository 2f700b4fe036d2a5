use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("catalog expects {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("requested {requested} shared dimensions but only {available} exist for (p={p}, q1={q1}, q2={q2})")]
    Dimension {
        requested: usize,
        available: usize,
        p: usize,
        q1: usize,
        q2: usize,
    },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("channel sampling produced rank-deficient matrices for all {attempts} sub-seeds of seed {seed}")]
    DegenerateRng { seed: u64, attempts: u32 },

    #[error("infeasible strategy: {0}")]
    Plan(String),

    #[error("ill-conditioned {what} (condition number {cond:.3e}); resample the channels")]
    IllConditioned { what: String, cond: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
