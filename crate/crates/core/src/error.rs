use thiserror::Error;

use crate::model::DofState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Some state reachable from the start can never complete the transfer.
    #[error("chain is not absorbing: state {state} cannot reach completion")]
    NonAbsorbing { state: DofState },

    #[error("linear solve failed (residual {residual:e})")]
    SingularSystem { residual: f64 },

    #[error("chain has no topological order; forward substitution is unavailable")]
    NotTopological,

    #[error("{trials} simulation trial(s) exceeded {max_slots} slots")]
    Truncated { trials: usize, max_slots: u64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonAbsorbing { .. } | Error::SingularSystem { .. } | Error::NotTopological
        )
    }
}
