//! Error types shared by all modules.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented invariant.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// An argument lies outside the domain of an operation.
    #[error("domain error in `{op}`: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Matrix/vector dimensions do not match.
    #[error("shape mismatch in `{op}`: expected {expected}, got {got}")]
    Shape {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureAccuracy { achieved: f64, requested: f64 },

    /// A state invariant was breached beyond tolerance during propagation.
    #[error("integration diverged at t = {time} ps: {what}")]
    IntegrationDiverged { time: f64, what: String },

    /// Scenario configuration failed validation.
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("malformed table file: {0}")]
    TableFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code category used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config { .. } | Error::Domain { .. } => 2,
            Error::QuadratureAccuracy { .. }
            | Error::IntegrationDiverged { .. }
            | Error::Shape { .. } => 3,
            Error::Io(_) | Error::Serde(_) | Error::TableFormat(_) => 4,
        }
    }
}
