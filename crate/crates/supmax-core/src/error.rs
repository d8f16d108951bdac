//! Error type shared by every module of the crate.

/// Failure modes of construction, simulation, and verification routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input violated its documented domain (negative rate, zero count, ...).
    #[error("invalid parameter `{name}` = {value}: requires {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The jump target leaves `y + h(y)` at zero somewhere, so the hazard and
    /// the descent speed are undefined. Happens exactly when `h(0) = 0`.
    #[error("degenerate jump target: h(0) must be strictly positive")]
    DegenerateTarget,

    /// A tabulated jump target failed its monotonicity/finiteness checks.
    #[error("invalid tabulated jump target: {0}")]
    InvalidTable(&'static str),

    /// Discrete construction with `mu_tilde >= 1/gamma` has no positive
    /// variance budget left.
    #[error("infeasible variance: mu_tilde = {mu_tilde} must be below 1/gamma = {limit}")]
    InfeasibleVariance { mu_tilde: f64, limit: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge on [{lo}, {hi}] (last estimate {estimate}): {detail}")]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        detail: &'static str,
    },

    /// Bracketed root finding failed (bracket growth or iteration cap).
    #[error("monotone inversion failed: {0}")]
    Inversion(&'static str),

    /// A partition handed to the quadratic-variation estimator was unusable.
    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),

    /// An estimator was asked to run with no data.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, value: f64, requirement: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            requirement,
        })
    }
}
