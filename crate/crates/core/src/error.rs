use thiserror::Error;

/// Failure while evaluating a user function at a point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation failed at t = {x}: {message}")]
pub struct EvalError {
    pub x: f64,
    pub message: String,
}

impl EvalError {
    pub fn new(x: f64, message: impl Into<String>) -> Self {
        Self {
            x,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    /// A parameter violates the construction invariants of a context or control.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Eval(#[from] EvalError),

    /// A limit did not settle within the iteration budget.
    #[error("no convergence after {iterations} iterations: {message}")]
    Convergence { iterations: usize, message: String },

    /// The node index search exceeded its cap.
    #[error("node index exceeds cap of {cap} (x too close to a)")]
    Cap { cap: usize },
}

impl QError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, QError>;
