use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum RgError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Guard against combinatorial blowup.
    #[error("size error: {0}")]
    Size(String),
    /// A numerical procedure did not reach its requested accuracy.
    #[error("numerical error: {msg} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Accuracy {
        msg: String,
        achieved: f64,
        requested: f64,
    },
    /// Missing or inconsistent configuration (profiles, mode sets, files).
    #[error("configuration error: {0}")]
    Config(String),
    /// Iterative solver failed to converge.
    #[error("solver error: {msg}; trace: {trace:?}")]
    Solver { msg: String, trace: Vec<String> },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}
