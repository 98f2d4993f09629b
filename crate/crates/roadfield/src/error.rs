//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar or structural parameter lies outside its admissible domain.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// The requested operation does not apply to this geometry.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// Central advection differences lose the sign structure when the grid
    /// Peclet number reaches 1.
    #[error(
        "grid Peclet number {peclet:.3e} violates the stability bound \
         |c|*hx/(2*min(D_road, d_field)) < 1; refine hx or reduce c"
    )]
    PecletViolation { peclet: f64 },

    /// Vector length does not conform to the operator.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Dense eigenvalue reference refuses matrices above its cap.
    #[error("matrix order {order} exceeds the dense reference cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    /// A pivot vanished during factorization (shift collides with an eigenvalue).
    #[error("factorization is singular (shift collides with an eigenvalue)")]
    SingularFactorization,

    /// Iterative eigensolver ran out of iterations.
    #[error("iteration failed to converge: residual {residual:.3e} after {iters} iterations")]
    IterativeFailure { residual: f64, iters: usize },

    /// The converged vector is not strictly positive; the discrete operator is
    /// degenerate or reducible, so no principal pair is reported.
    #[error("converged eigenvector is not positive (degenerate or reducible operator)")]
    NonPositiveEigenvector,

    /// Energy-form operations require the self-adjoint case c = 0.
    #[error("self-adjoint form requires c = 0 (got c = {c})")]
    NotSelfAdjoint { c: f64 },

    /// A quotient denominator vanished or is not finite.
    #[error("denominator is zero or not finite")]
    ZeroDenominator,

    /// No small multiple of the truncated eigenfunction is a subsolution.
    #[error("no admissible subsolution: {0}")]
    NoSubsolution(String),

    /// Time step kept producing negative entries after repeated halving.
    #[error("time step rejected after {retries} halvings; negative entries persist (reduce dt)")]
    StepRejected { retries: usize },

    /// Configuration file problem; `pointer` is a JSON-pointer-style path.
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for a config error with a JSON-pointer path.
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { pointer: pointer.into(), message: message.into() }
    }

    /// True for errors that indicate a bad configuration rather than a
    /// numerical failure; the CLI maps these to exit code 2.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::Io(_)
                | Error::ParameterDomain(_)
                | Error::GeometryMismatch(_)
                | Error::PecletViolation { .. }
        )
    }

    /// Process exit code for the CLI: 2 for configuration and invocation
    /// problems, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_config() {
            2
        } else {
            1
        }
    }
}
