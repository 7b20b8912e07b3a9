use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input was outside the domain of the operation (non-finite, non-positive, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A variable appears in a denominator and is zero.
    #[error("singularity: {0}")]
    Singularity(String),

    /// The endpoints of a bracket do not enclose a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An iterative method ran out of iterations or could not reach the tolerance.
    #[error("did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Malformed corpus input.
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Invalid harness configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
