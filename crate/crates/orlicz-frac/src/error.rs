//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A Young-function invariant failed on the sample grid.
    #[error("young function validation failed at t = {t}: {reason}")]
    Validation { t: f64, reason: String },

    /// No bracket found for a monotone root solve.
    #[error("no bracket found for {what} after {doublings} doublings")]
    Bracket { what: &'static str, doublings: u32 },

    /// A quadrature node produced a non-finite value.
    #[error("non-finite value at x = {x} while computing {what}")]
    NonFinite { what: &'static str, x: f64 },

    /// The graded refinement of a diagonal-singular integral did not settle.
    #[error("diagonal refinement diverges (estimate grew from {coarse} to {fine}); input is likely not Lipschitz")]
    DiagonalDivergence { coarse: f64, fine: f64 },

    /// A tail-weighted integral diverges under the declared tail model.
    #[error("tail integral diverges (local decay exponent {exponent} <= 1)")]
    TailDivergence { exponent: f64 },

    /// A principal-value evaluation did not converge under refinement.
    #[error("PV evaluation not converged: refinement changed value by {change} (tolerance {tol})")]
    NotConverged { change: f64, tol: f64 },

    /// Evaluation at a degenerate critical point without admissible data.
    #[error("singular critical point at x = {x}: p- = {p_minus} <= 2/(2-s) and gradient vanishes; {reason}")]
    SingularityAtCriticalPoint { x: f64, p_minus: f64, reason: String },

    /// Decay probe called with too narrow a radius range.
    #[error("decay probe needs radii spanning >= 2 decades, got {decades:.2}")]
    InsufficientDecades { decades: f64 },

    /// Touching test function exceeds the candidate solution.
    #[error("test function exceeds u by {violation} at x = {x}")]
    TouchViolation { x: f64, violation: f64 },

    /// Nonlinear Gauss-Seidel ran out of sweeps.
    #[error("solver hit max sweeps ({sweeps}); residual sup-norm {residual}")]
    MaxIterations { sweeps: usize, residual: f64 },

    /// The discrete solver requires a source nonincreasing in u.
    #[error("source function is not flagged nonincreasing in r; the monotone solver requires it")]
    NonMonotoneSource,

    /// Scenario config malformed or out of range.
    #[error("scenario schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
