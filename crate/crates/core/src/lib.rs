//! Evolution of the splitting tensor and the shape operators along relative
//! nullity geodesics of submanifolds of space forms, with the spectral
//! constraints and rigidity thresholds that follow from it.
//!
//! Everything is expressed in a parallel orthonormal frame of the conullity
//! along a unit-speed nullity geodesic `γ`. With `C0 = C_{γ'(0)}` and the
//! ambient curvature `c`, the Jacobi tensor `J(t)` solves `J'' + cJ = 0`,
//! `J(0) = I`, `J'(0) = -C0`, and
//!
//! ```text
//! C(t) = -J'(t) J(t)^-1,    A_ξ(t) = A_ξ(0) J(t)^-1.
//! ```
//!
//! ```
//! use nullity_core::{max_invertible_time, SpaceFormCurvature, SplittingTensor};
//!
//! let c0 = SplittingTensor::from_row_slice(1, &[1.0]);
//! let b = max_invertible_time(SpaceFormCurvature::SPHERE, &c0).unwrap();
//! assert!((b - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
//! ```

pub mod catalog;
pub mod classify;
mod error;
pub mod evolution;
pub mod linalg;
pub mod matrix_serde;
pub mod oracle;
pub mod sampling;
mod tensor;
pub mod theorems;

pub use classify::{
    classify_splitting_spectrum, decay_report, sign_balance_check, AlphaLimit, Behavior, BlockDescriptor, BlockKind,
    BlockReport, Clause, DecayReport, Eigenvalue, RealInterval, SpectrumVerdict,
};
pub use error::{NullityError, Result};
pub use evolution::{
    evolve, is_codazzi_compatible, jacobi_derivative, jacobi_tensor, max_invertible_time, shape_operator_at,
    splitting_tensor_at, EvolutionState, JacobiTensor,
};
pub use linalg::Matrix;
pub use tensor::{
    CurvatureBranch, GeodesicDomain, NullityProfile, ShapeOperatorSet, SpaceFormCurvature, SplittingTensor,
};
pub use theorems::{SpecialDirection, SplittingFamily};
