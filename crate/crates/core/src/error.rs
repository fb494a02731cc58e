use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("equilibrium solver did not converge after {iterations} iterations (max residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unstable configuration: Hessian eigenvalue {eigenvalue:e} is not positive")]
    UnstableConfiguration { eigenvalue: f64 },

    #[error("ion {ion} has cubic anharmonicity but zero resonance-frequency gradient")]
    ZeroGradient { ion: usize },

    #[error("transversal analysis requires omega_radial")]
    MissingRadial,

    #[error("transversal corrections are only defined for vanishing transversal gradients")]
    TransversalGradient,

    #[error("truncated space dimension {dimension} exceeds the limit of {limit}")]
    DimensionGuard { dimension: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnknownKey(_)
                | Error::InvalidConfig { .. }
                | Error::MissingRadial
                | Error::TransversalGradient
                | Error::ZeroGradient { .. }
                | Error::DimensionGuard { .. }
                | Error::DimensionMismatch(_)
        )
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
