//! Crate-wide error type.

/// Errors produced by the configuration framework.
///
/// Target-algorithm misbehaviour (crashes, timeouts, wrong answers) is *data*
/// and never surfaces here; only framework-level failures do.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pcs syntax error at line {line}: {msg}")]
    PcsSyntax { line: usize, msg: String },
    #[error("invalid parameter space: {0}")]
    InvalidSpace(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("space too constrained: no valid configuration found in {0} attempts")]
    SpaceTooConstrained(usize),
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("undefined statistic: {0}")]
    Undefined(String),
    #[error("space too large to enumerate (more than {0} configurations)")]
    SpaceTooLarge(u64),
    #[error("wrapper failure: {0}")]
    Wrapper(String),
    #[error("budget exhausted")]
    BudgetExhausted,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
