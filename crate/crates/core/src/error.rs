use thiserror::Error;

/// Errors produced by the model, the oracles and the sweep engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value violates a structural invariant of its type.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// The closed-form optimum only exists in the underdamped regime.
    #[error("t_opt formula not applicable for xi = {xi} (requires xi > 1)")]
    BranchNotApplicable { xi: f64 },

    /// The density matrix carries coherences the X-state shortcut cannot see.
    #[error("state is not of the model form: {0}")]
    FormViolation(String),

    /// Adaptive step size collapsed below the underflow floor.
    #[error("step size underflow at tau = {tau}: dt = {dt:e}")]
    StepUnderflow { tau: f64, dt: f64 },

    /// An integrator drifted outside the tolerated invariant band.
    #[error("integration failure at tau = {tau}: {reason}")]
    IntegrationFailure { tau: f64, reason: String },

    /// An eigen-solver did not produce usable output.
    #[error("eigen-decomposition failed: {reason}\n{matrix}")]
    Eigen { reason: String, matrix: String },

    /// The requested sideband coupling exceeds what the drive can reach.
    #[error("target xi = {target_xi} unreachable; maximum achievable xi is {max_xi}")]
    Unreachable { target_xi: f64, max_xi: f64 },

    /// A sweep grid point failed; wraps the underlying error.
    #[error("grid point (xi = {xi}, tau = {tau}): {source}")]
    GridPoint {
        xi: f64,
        tau: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
