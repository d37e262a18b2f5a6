use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The grid lacks a structural property an operation relies on.
    #[error("unsupported grid: {0}")]
    UnsupportedGrid(String),

    /// Invalid configuration; the message lists every violated constraint.
    #[error("config error: {0}")]
    Config(String),

    /// Work refused because it exceeds the configured budget (pass --force to override).
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    /// The orthogonality hypothesis failed, so classification is suppressed.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
