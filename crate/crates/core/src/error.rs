use thiserror::Error;

use crate::C64;

/// Errors raised by the continuation engines and the zeta pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("s = {s} lies within {radius:e} of candidate pole {pole}")]
    PoleProximity { s: C64, pole: f64, radius: f64 },

    #[error("Re(s) = {re} is outside the admissible half-plane Re(s) > {bound} ({detail})")]
    HalfPlaneExceeded { re: f64, bound: f64, detail: String },

    #[error("function is flat at the origin (empty Newton polyhedron)")]
    Flat,

    #[error("unsupported case {case:?}: {reason}")]
    UnsupportedCase { case: crate::funcmodel::Case, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("divergence suspected: {0}")]
    DivergenceSuspected(String),

    #[error("numerical diagnostic: {0}")]
    Diagnostic(String),
}

pub type Result<T, E = ZetaError> = std::result::Result<T, E>;
