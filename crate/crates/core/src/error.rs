use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of a function.
    #[error("{what}: argument {value} outside supported domain")]
    Domain { what: &'static str, value: f64 },

    /// A distribution parameter is invalid.
    #[error("invalid {kind} distribution: {reason}")]
    InvalidDistribution { kind: &'static str, reason: String },

    /// A tier violates a model invariant.
    #[error("tier {tier}, field `{field}`: {reason}")]
    InvalidTier {
        tier: usize,
        field: &'static str,
        reason: String,
    },

    /// The network has no tiers.
    #[error("network model has no tiers")]
    EmptyModel,

    /// A requested moment does not exist or has no closed form.
    #[error("moment of order {q} unavailable for {kind}: {reason}")]
    Moment {
        kind: &'static str,
        q: f64,
        reason: &'static str,
    },

    /// Numerical integration did not reach its tolerance.
    #[error("quadrature did not converge: estimated error {error:e} after {intervals} intervals")]
    QuadratureNonConvergence { error: f64, intervals: usize },

    /// An intensity or density is singular at the requested point.
    #[error("{0}")]
    Singular(&'static str),

    /// A truncation radius achieving the target missed mass does not exist below the cap.
    #[error("missed mass {achievable:e} at radius cap {cap} exceeds target {epsilon:e}")]
    Infeasible {
        cap: f64,
        achievable: f64,
        epsilon: f64,
    },

    /// Operation requires inputs not supported by this implementation.
    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    /// Generic precondition failure.
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
