use thiserror::Error;

/// Errors raised by the modeling, analytics and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or scenario parameter is out of its valid range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An operation was called outside of its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A latency budget cannot be met.
    #[error("infeasible budget: sender budget {sender:.6} s exceeds the maximal T_AB {max:.6} s")]
    InfeasibleBudget { sender: f64, max: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
