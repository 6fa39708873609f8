use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimerError {
    /// A parameter is outside its physical domain.
    #[error("{field} {reason}")]
    Domain { field: &'static str, reason: String },

    /// The two-excitation denominator vanished or lost all precision.
    #[error("parameter degeneracy: {0}")]
    Degeneracy(String),

    /// Caller broke an evaluation contract (e.g. off-shell momenta).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("no transmitted flux (denominator {0:e})")]
    NoFlux(f64),

    #[error("no signal: cavity occupation {0:e} below floor")]
    NoSignal(f64),

    #[error("non-unique steady state (second singular value {0:e})")]
    NonUniqueSteadyState(f64),

    #[error("basis too large: {0} superoperator entries")]
    BasisTooLarge(usize),
}

impl DimerError {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        DimerError::Domain {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, DimerError>;
