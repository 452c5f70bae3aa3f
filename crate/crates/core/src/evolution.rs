//! Closed-form evolution of the Jacobi tensor, the splitting tensor and the
//! shape operators along a unit-speed nullity geodesic.
//!
//! All tensors live in a parallel orthonormal frame along the geodesic, so
//! parallel transport is the identity in coordinates. With `s = √|c|`,
//!
//! ```text
//! J(t) = a(t) I - b(t) C0,   a = cos st | 1 | cosh st,   b = sin st / s | t | sinh st / s
//! C(t) = -J'(t) J(t)^-1
//! A(t) = A0 J(t)^-1
//! ```
//!
//! `J(t)` is a polynomial in `C0`, so `J`, `J'` and `C0` commute.

use serde::{Deserialize, Serialize};

use crate::error::{NullityError, Result};
use crate::linalg::{self, Matrix};
use crate::matrix_serde;
use crate::tensor::{CurvatureBranch, ShapeOperatorSet, SpaceFormCurvature, SplittingTensor};

/// `J(t)` for a fixed initial splitting tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiTensor {
    #[serde(with = "matrix_serde::row_major")]
    pub mat: Matrix,
    pub t: f64,
}

/// Full state at arc length `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionState {
    pub t: f64,
    pub jacobi: JacobiTensor,
    pub splitting: SplittingTensor,
    pub shape: ShapeOperatorSet,
}

/// Scalar coefficients `(a, b, a', b')` with `J = aI - bC0` and `J' = a'I - b'C0`.
pub(crate) fn jacobi_coefficients(c: SpaceFormCurvature, t: f64) -> (f64, f64, f64, f64) {
    let s = c.sqrt_abs();
    match c.branch() {
        CurvatureBranch::Spherical => {
            let (sin, cos) = (s * t).sin_cos();
            (cos, sin / s, -s * sin, cos)
        }
        CurvatureBranch::Flat => (1.0, t, 0.0, 1.0),
        CurvatureBranch::Hyperbolic => {
            let (sinh, cosh) = ((s * t).sinh(), (s * t).cosh());
            (cosh, sinh / s, s * sinh, cosh)
        }
    }
}

fn affine_in(c0: &Matrix, alpha: f64, beta: f64) -> Matrix {
    let q = c0.nrows();
    let mut m = c0 * (-beta);
    for i in 0..q {
        m[(i, i)] += alpha;
    }
    m
}

/// For `c < 0`, `(I - C0/s, I + C0/s)` with weights `(e^{st}/2, e^{-st}/2)`.
/// Writing `J` this way avoids the cancellation in `cosh - sinh` that would
/// otherwise swamp the decaying mode on the eigenvalue `s`.
fn hyperbolic_modes(c: SpaceFormCurvature, c0: &Matrix, t: f64) -> (Matrix, Matrix, f64, f64) {
    let s = c.sqrt_abs();
    let q = c0.nrows();
    let scaled = c0 / s;
    let id = Matrix::identity(q, q);
    ((&id - &scaled), (id + scaled), 0.5 * (s * t).exp(), 0.5 * (-s * t).exp())
}

pub fn jacobi_tensor(c: SpaceFormCurvature, c0: &SplittingTensor, t: f64) -> JacobiTensor {
    if c.branch() == CurvatureBranch::Hyperbolic {
        let (grow, shrink, up, down) = hyperbolic_modes(c, c0.matrix(), t);
        return JacobiTensor { mat: grow * up + shrink * down, t };
    }
    let (a, b, _, _) = jacobi_coefficients(c, t);
    JacobiTensor { mat: affine_in(c0.matrix(), a, b), t }
}

/// Exact `dJ/dt`.
pub fn jacobi_derivative(c: SpaceFormCurvature, c0: &SplittingTensor, t: f64) -> Matrix {
    if c.branch() == CurvatureBranch::Hyperbolic {
        let s = c.sqrt_abs();
        let (grow, shrink, up, down) = hyperbolic_modes(c, c0.matrix(), t);
        return grow * (s * up) - shrink * (s * down);
    }
    let (_, _, da, db) = jacobi_coefficients(c, t);
    affine_in(c0.matrix(), da, db)
}

/// First positive time at which the scalar factor `a(t) - b(t) λ` vanishes for
/// a real eigenvalue `λ`; infinite when it never does.
fn first_singular_time(c: SpaceFormCurvature, lambda: f64) -> f64 {
    let s = c.sqrt_abs();
    match c.branch() {
        // cot(st) = λ/s has exactly one root with st in (0, π).
        CurvatureBranch::Spherical => (std::f64::consts::FRAC_PI_2 - (lambda / s).atan()) / s,
        CurvatureBranch::Flat => {
            if lambda > 0.0 {
                1.0 / lambda
            } else {
                f64::INFINITY
            }
        }
        // coth(st) = λ/s needs λ > s; arcoth(x) = atanh(1/x).
        CurvatureBranch::Hyperbolic => {
            if lambda > s {
                (s / lambda).atanh() / s
            } else {
                f64::INFINITY
            }
        }
    }
}

/// `inf { t > 0 : det J(t) = 0 }`, from the real eigenvalues of `C0`.
/// Complex eigenvalues never make the scalar factor vanish for `t > 0`.
pub fn max_invertible_time(c: SpaceFormCurvature, c0: &SplittingTensor) -> Result<f64> {
    Ok(linalg::real_eigenvalues(c0.matrix())?
        .into_iter()
        .map(|lambda| first_singular_time(c, lambda))
        .fold(f64::INFINITY, f64::min))
}

/// Checks `t` against the invertibility interval. Negative times walk the
/// geodesic backwards, which is the forward walk for `-C0`.
fn ensure_invertible(c: SpaceFormCurvature, c0: &SplittingTensor, t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(NullityError::InvalidArgument(format!("time must be finite, got {t}")));
    }
    let (reach, probe) = if t >= 0.0 {
        (max_invertible_time(c, c0)?, t)
    } else {
        let reversed = SplittingTensor::new(-c0.matrix())?;
        (max_invertible_time(c, &reversed)?, -t)
    };
    if probe >= reach {
        return Err(NullityError::SingularJacobi { t, b_max: reach });
    }
    Ok(())
}

fn invert_jacobi(j: &JacobiTensor, c: SpaceFormCurvature, c0: &SplittingTensor) -> Result<Matrix> {
    j.mat.clone().try_inverse().ok_or_else(|| NullityError::SingularJacobi {
        t: j.t,
        b_max: max_invertible_time(c, c0).unwrap_or(f64::NAN),
    })
}

/// `C(t) = -J'(t) J(t)^-1` without the invertibility pre-check. Used inside
/// integrators that have already validated their time window.
pub(crate) fn splitting_unchecked(c: SpaceFormCurvature, c0: &SplittingTensor, t: f64) -> Result<Matrix> {
    if t == 0.0 {
        return Ok(c0.matrix().clone());
    }
    let j = jacobi_tensor(c, c0, t);
    let inv = invert_jacobi(&j, c, c0)?;
    Ok(-(jacobi_derivative(c, c0, t) * inv))
}

pub fn splitting_tensor_at(c: SpaceFormCurvature, c0: &SplittingTensor, t: f64) -> Result<SplittingTensor> {
    ensure_invertible(c, c0, t)?;
    SplittingTensor::new(splitting_unchecked(c, c0, t)?)
}

/// `A_ξ(t) = A_ξ(0) J(t)^-1` for every operator in the set. Symmetry of the
/// result is only guaranteed for Codazzi-compatible initial data.
pub fn shape_operator_at(
    a0: &ShapeOperatorSet,
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    t: f64,
) -> Result<ShapeOperatorSet> {
    check_shape_dims(a0, c0)?;
    ensure_invertible(c, c0, t)?;
    if t == 0.0 {
        return Ok(a0.clone());
    }
    let inv = invert_jacobi(&jacobi_tensor(c, c0, t), c, c0)?;
    Ok(ShapeOperatorSet::new_unchecked(a0.ops().iter().map(|a| a * &inv).collect()))
}

pub fn evolve(
    a0: &ShapeOperatorSet,
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    t: f64,
) -> Result<EvolutionState> {
    check_shape_dims(a0, c0)?;
    ensure_invertible(c, c0, t)?;
    let jacobi = jacobi_tensor(c, c0, t);
    let inv = invert_jacobi(&jacobi, c, c0)?;
    let (splitting, shape) = if t == 0.0 {
        (c0.clone(), a0.clone())
    } else {
        let split = -(jacobi_derivative(c, c0, t) * &inv);
        let ops = a0.ops().iter().map(|a| a * &inv).collect();
        (SplittingTensor::new(split)?, ShapeOperatorSet::new_unchecked(ops))
    };
    Ok(EvolutionState { t, jacobi, splitting, shape })
}

pub(crate) fn check_shape_dims(a0: &ShapeOperatorSet, c0: &SplittingTensor) -> Result<()> {
    match a0.dim() {
        Some(d) if d != c0.dim() => Err(NullityError::DimensionMismatch(format!(
            "shape operators are {d}x{d} but the splitting tensor is {q}x{q}",
            q = c0.dim()
        ))),
        _ => Ok(()),
    }
}

/// Whether `A_ξ C0^k` is symmetric for every `ξ` and `k = 0, …, q-1`, i.e.
/// whether `A_ξ J(t)^-1` stays symmetric for all `t` (Cayley–Hamilton).
pub fn is_codazzi_compatible(a0: &ShapeOperatorSet, c0: &SplittingTensor) -> bool {
    if check_shape_dims(a0, c0).is_err() {
        return false;
    }
    // Compatibility is scale invariant in C0; normalizing keeps powers tame.
    let scale = linalg::max_abs(c0.matrix());
    let unit = if scale > 0.0 { c0.matrix() / scale } else { c0.matrix().clone() };
    let q = c0.dim();
    a0.ops().iter().all(|a| {
        let mut product = a.clone();
        for k in 0..q.max(1) {
            if k > 0 {
                product = &product * &unit;
            }
            if linalg::relative_asymmetry(&product) > linalg::SYMMETRY_TOL {
                return false;
            }
        }
        true
    })
}
