//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by constructors, kernels, and integrators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not symmetric: ‖S − Sᵀ‖_F = {residual:.3e} exceeds tolerance {tol:.3e}")]
    NonSymmetric { residual: f64, tol: f64 },

    #[error("matrix is not positive definite: min eigenvalue {min_eig:.3e} ≤ floor {floor:.3e}")]
    NotPositiveDefinite { min_eig: f64, floor: f64 },

    #[error("matrix is not symplectic: ‖SᵀJS − J‖_F = {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },

    #[error("denominator too ill-conditioned: cond = {cond:.3e} exceeds guard {guard:.3e}")]
    SingularDenominator { cond: f64, guard: f64 },

    #[error("pair is not unitary: residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("matrix is not orthogonal: ‖RᵀR − I‖_F = {residual:.3e}")]
    NotOrthogonal { residual: f64 },

    #[error("matrix is not skew-symmetric: ‖S + Sᵀ‖_F = {residual:.3e}")]
    NotSkew { residual: f64 },

    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("(Q,P) violates the symplectic constraints: residual {residual:.3e}")]
    ConstraintViolation { residual: f64 },

    #[error("state is off the constraint manifold: residual {residual:.3e}")]
    OffShell { residual: f64 },

    #[error("Q is numerically singular (|det Q| = {det_abs:.3e})")]
    SingularQ { det_abs: f64 },

    #[error("width matrix B left the positive-definite cone (min eigenvalue {min_eig:.3e}); reduce the step size")]
    BLost { min_eig: f64 },

    #[error("branch-tracking step guard violated: |Δ arg det Q| = {increment:.3e} ≥ π/2; reduce the step size")]
    StepGuardViolation { increment: f64 },

    #[error("point is not on the momentum level set: ‖M(Z) − J‖_F = {residual:.3e}")]
    NotOnLevelSet { residual: f64 },

    #[error("tangent violates the linearized constraint: ‖dM(Z)·v‖_F = {residual:.3e}")]
    TangencyViolation { residual: f64 },

    #[error("quadrature grid too coarse: {context}")]
    GridTooCoarse { context: String },

    #[error("trajectory record is empty")]
    EmptyRecord,

    #[error("scheme not supported for this state kind: {context}")]
    UnsupportedScheme { context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
