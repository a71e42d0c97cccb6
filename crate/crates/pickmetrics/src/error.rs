use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside the open unit {domain}: norm = {norm}")]
    DomainViolation { domain: &'static str, norm: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("power series has zero constant term")]
    ZeroConstantTerm,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge to tol {tol:e} (last interval error {reached:e})")]
    QuadratureNonConvergence { tol: f64, reached: f64 },

    #[error("metric overflow: points numerically on the boundary of resolvability")]
    Overflow,

    #[error("kernel evaluation inconsistency: 1 - |k|^2/(k(z,z) k(w,w)) = {value:e} beyond the clamp threshold")]
    KernelInconsistency { value: f64 },

    #[error("separation failed: adjacent lattice distance {got} is below eps = {eps}")]
    SeparationFailed { got: f64, eps: f64 },

    #[error("curve is not flagged piecewise C^1")]
    NonSmoothCurve,

    #[error("no grid point lies past the separation threshold u = {threshold:e}")]
    GridBelowThreshold { threshold: f64 },

    #[error("duplicate source points in distortion sample (pair {i}, {j})")]
    DuplicateSource { i: usize, j: usize },
}

impl Error {
    /// Exit code contract for the CLI: 2 for precondition violations,
    /// 3 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::QuadratureNonConvergence { .. } | Error::Overflow => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
