use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NullityError {
    /// The Jacobi tensor is singular at or before the requested time, so the
    /// nullity geodesic cannot be continued that far.
    #[error("Jacobi tensor is singular: t = {t} is not below the maximal invertible time {b_max}")]
    SingularJacobi { t: f64, b_max: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator {index} is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { index: usize, asymmetry: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("splitting spectrum is inconsistent with the geodesic domain: {0}")]
    InconsistentSpectrum(String),

    #[error("no special nullity direction: the symmetric-traceless map is injective")]
    NoDirection,

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("nullity subspaces are not constant (max principal angle {max_angle:e} rad)")]
    NotConstant { max_angle: f64 },

    #[error("splitting tensor {index} is not self-adjoint (relative asymmetry {asymmetry:e}); conullity is not integrable")]
    NotIntegrable { index: usize, asymmetry: f64 },

    #[error("eigenvalue iteration did not converge")]
    EigenSolver,
}

pub type Result<T> = std::result::Result<T, NullityError>;
