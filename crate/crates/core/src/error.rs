//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },

    /// Gamma function evaluated at a nonpositive integer.
    #[error("gamma pole at x = {x}")]
    GammaPole { x: f64 },

    /// An iteration failed to converge within its budget.
    #[error("{op} did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// The particular solution vanishes inside the interval; the recursive
    /// integrals are not defined for such potentials.
    #[error("unsupported potential: particular solution vanishes near x = {x:.6}")]
    UnsupportedPotential { x: f64 },

    /// Requested order exceeds what binary64 can represent.
    #[error("{op}: order {requested} overflows f64, largest safe order is {max_safe}")]
    Range {
        op: &'static str,
        requested: usize,
        max_safe: usize,
    },

    /// A series summation lost too many digits to cancellation.
    #[error("accuracy loss in {op}: partial value {value:.6e}, cancellation ratio {cancellation:.3e}")]
    AccuracyLoss {
        op: &'static str,
        value: f64,
        cancellation: f64,
    },

    /// Linear system could not be solved and no fallback succeeded.
    #[error("singular system in {op}")]
    Singular { op: &'static str },

    /// Spectral parameter below the supported region Λ = λ − q(0) > 0.
    #[error("unsupported spectral region: λ = {lambda} gives Λ = {big_lambda} ≤ 0")]
    UnsupportedSpectralRegion { lambda: f64, big_lambda: f64 },

    /// A documented precondition was violated.
    #[error("precondition violated in {op}: {message}")]
    Precondition { op: &'static str, message: String },

    /// Problem configuration is invalid.
    #[error("config error: {0}")]
    Config(String),

    /// Syntax error in a potential expression.
    #[error("syntax error at offset {offset}: {message}")]
    ExprSyntax { offset: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(op: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            op,
            message: message.into(),
        }
    }

    pub fn precondition(op: &'static str, message: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            message: message.into(),
        }
    }

    /// Process exit code contract: 1 for configuration problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ExprSyntax { .. } | Error::Io(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}
