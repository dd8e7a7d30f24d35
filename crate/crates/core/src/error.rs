use thiserror::Error;

/// Errors surfaced by configuration validation, operators, and runs.
#[derive(Debug, Error)]
pub enum EvoError {
    /// A configuration or parameter failed validation before any run started.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An operator or problem was applied to a genotype it does not fit.
    #[error("genotype mismatch: {0}")]
    GenotypeMismatch(String),

    /// A selection operator could not produce a draw.
    #[error("selection failed: {0}")]
    Selection(String),

    /// A statistical computation was undefined for its input.
    #[error("statistics: {0}")]
    Stats(String),

    /// A run inside a batch failed; the seed identifies which one.
    #[error("run with seed {seed} failed: {message}")]
    RunFailed { seed: u64, message: String },

    /// A problem data file could not be read or parsed.
    #[error("{path}: {message}")]
    DataFile { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, EvoError>;
