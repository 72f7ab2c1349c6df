use thiserror::Error;

/// Errors raised by the model, the quadrature engine and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain the model is defined on.
    #[error("invalid `{field}`: {reason}")]
    ParameterDomain { field: &'static str, reason: String },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: best estimate {estimate} with error estimate {error_estimate}")]
    Convergence { estimate: f64, error_estimate: f64 },

    /// The integrand produced a NaN or infinite value.
    #[error("integrand returned non-finite value {value} at x = {at}")]
    NonFiniteIntegrand { at: f64, value: f64 },

    /// A simulation configuration that cannot represent the sampled geometry.
    #[error("simulation configuration: {0}")]
    Configuration(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Error {
    Error::ParameterDomain {
        field,
        reason: reason.into(),
    }
}
