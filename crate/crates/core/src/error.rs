use crate::state::StateClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("observable reads {expected} states but was given a {found} state")]
    ArityMismatch {
        expected: StateClass,
        found: StateClass,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("gradient is not finite at coordinate {index}")]
    NonFiniteGradient { index: usize },

    #[error("dissipated power K = {k:e} is below the threshold {k_min:e}; the first-form bracket is singular here")]
    DegenerateK { k: f64, k_min: f64 },

    #[error("nonpositive temperature {value} (index {index})")]
    NonpositiveTemperature { index: usize, value: f64 },

    #[error("invalid system specification: {0}")]
    Spec(String),

    #[error(
        "Legendre transform inversion failed after {iterations} iterations (residual {residual:e})"
    )]
    LegendreInversionFailure { residual: f64, iterations: usize },

    #[error("friction matrix is singular (condition number {condition:e})")]
    SingularFrictionMatrix { condition: f64 },

    #[error("state left the admissible domain{}: {reason}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    DomainViolation { step: Option<usize>, reason: String },

    #[error("suite `{suite}` is not supported for system `{system}`")]
    UnsupportedSuite { suite: String, system: String },
}

impl Error {
    /// Short machine-readable tag used by the CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidState(_) => "invalid_state",
            Error::NonFiniteGradient { .. } => "non_finite_gradient",
            Error::DegenerateK { .. } => "degenerate_k",
            Error::NonpositiveTemperature { .. } => "nonpositive_temperature",
            Error::Spec(_) => "spec_error",
            Error::LegendreInversionFailure { .. } => "legendre_inversion_failure",
            Error::SingularFrictionMatrix { .. } => "singular_friction_matrix",
            Error::DomainViolation { .. } => "domain_violation",
            Error::UnsupportedSuite { .. } => "unsupported_suite",
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            Error::DomainViolation { reason, .. } => Error::DomainViolation {
                step: Some(step),
                reason,
            },
            other => other,
        }
    }
}
