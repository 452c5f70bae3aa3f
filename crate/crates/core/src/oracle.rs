//! Numerical routes that do not go through the closed forms: fixed-step RK4
//! integration of the Riccati and shape-operator equations, and a root search
//! on `det J(t)` by dense sampling.

use crate::error::{NullityError, Result};
use crate::evolution::{check_shape_dims, jacobi_tensor, max_invertible_time, splitting_unchecked};
use crate::linalg::{self, Matrix};
use crate::tensor::{ShapeOperatorSet, SpaceFormCurvature, SplittingTensor};

/// Integration aborts once any entry of the state exceeds this magnitude.
pub const BLOW_UP_GUARD: f64 = 1e8;

/// Default integrator step.
pub const DEFAULT_STEP: f64 = 1e-3;

fn rk4_step<F>(f: &F, t: f64, y: &Matrix, h: f64) -> Result<Matrix>
where
    F: Fn(f64, &Matrix) -> Result<Matrix>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &(y + &k1 * (0.5 * h)))?;
    let k3 = f(t + 0.5 * h, &(y + &k2 * (0.5 * h)))?;
    let k4 = f(t + h, &(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn validate_grid(times: &[f64], step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(NullityError::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let mut prev = 0.0;
    for &t in times {
        if !(t.is_finite() && t >= prev) {
            return Err(NullityError::InvalidArgument(
                "sample times must be finite, non-negative and ascending".into(),
            ));
        }
        prev = t;
    }
    Ok(())
}

/// Integrates `y' = f(t, y)` from `y(0) = y0`, recording `y` at each sample
/// time. Steps are shortened to land exactly on the samples.
fn integrate<F>(f: F, y0: &Matrix, times: &[f64], step: f64) -> Result<Vec<Matrix>>
where
    F: Fn(f64, &Matrix) -> Result<Matrix>,
{
    validate_grid(times, step)?;
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut y = y0.clone();
    for &target in times {
        while t < target {
            let h = step.min(target - t);
            y = rk4_step(&f, t, &y, h)?;
            t = if target - t <= step { target } else { t + h };
            let size = linalg::max_abs(&y);
            if !size.is_finite() || size > BLOW_UP_GUARD {
                return Err(NullityError::SingularJacobi { t, b_max: t });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// RK4 solution of `dC/dt = C² + cI`, `C(0) = C0`, sampled at `times`.
pub fn riccati_trajectory(
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    times: &[f64],
    step: f64,
) -> Result<Vec<SplittingTensor>> {
    let q = c0.dim();
    let cv = c.value();
    let rhs = |_t: f64, y: &Matrix| -> Result<Matrix> { Ok(y * y + Matrix::identity(q, q) * cv) };
    integrate(rhs, c0.matrix(), times, step)?
        .into_iter()
        .map(SplittingTensor::new)
        .collect()
}

pub fn riccati_flow(c: SpaceFormCurvature, c0: &SplittingTensor, t_end: f64, step: f64) -> Result<SplittingTensor> {
    Ok(riccati_trajectory(c, c0, &[t_end], step)?.remove(0))
}

fn stack(ops: &[Matrix], q: usize) -> Matrix {
    let mut s = Matrix::zeros(q * ops.len(), q);
    for (i, a) in ops.iter().enumerate() {
        s.view_mut((i * q, 0), (q, q)).copy_from(a);
    }
    s
}

fn unstack(s: &Matrix, q: usize) -> ShapeOperatorSet {
    let count = s.nrows().checked_div(q).unwrap_or(0);
    ShapeOperatorSet::new_unchecked((0..count).map(|i| s.view((i * q, 0), (q, q)).into_owned()).collect())
}

/// RK4 solution of `dA_ξ/dt = A_ξ C(t)` with `C(t)` from the closed form,
/// sampled at `times`.
pub fn shape_ode_trajectory(
    a0: &ShapeOperatorSet,
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    times: &[f64],
    step: f64,
) -> Result<Vec<ShapeOperatorSet>> {
    check_shape_dims(a0, c0)?;
    let last = times.last().copied().unwrap_or(0.0);
    let b_max = max_invertible_time(c, c0)?;
    if last >= b_max {
        return Err(NullityError::SingularJacobi { t: last, b_max });
    }
    let q = c0.dim();
    let rhs = |t: f64, y: &Matrix| -> Result<Matrix> { Ok(y * splitting_unchecked(c, c0, t)?) };
    Ok(integrate(rhs, &stack(a0.ops(), q), times, step)?
        .iter()
        .map(|s| unstack(s, q))
        .collect())
}

pub fn shape_ode_flow(
    a0: &ShapeOperatorSet,
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    t_end: f64,
    step: f64,
) -> Result<ShapeOperatorSet> {
    Ok(shape_ode_trajectory(a0, c, c0, &[t_end], step)?.remove(0))
}

fn det_at(c: SpaceFormCurvature, c0: &SplittingTensor, t: f64) -> f64 {
    jacobi_tensor(c, c0, t).mat.determinant()
}

fn bisect_sign_change(c: SpaceFormCurvature, c0: &SplittingTensor, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = det_at(c, c0, lo);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let f_mid = det_at(c, c0, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of `|det J|`, for roots of even multiplicity
/// where the determinant touches zero without changing sign.
fn touching_root(c: SpaceFormCurvature, c0: &SplittingTensor, mut lo: f64, mut hi: f64) -> Option<f64> {
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let f = |t: f64| det_at(c, c0, t).abs();
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let t = 0.5 * (lo + hi);
    let scale = linalg::spectral_norm(&jacobi_tensor(c, c0, t).mat).max(1.0).powi(c0.dim() as i32);
    (f(t) <= 1e-10 * scale).then_some(t)
}

/// First zero of `det J(t)` in `(0, horizon]`, found by sampling with `step`
/// and refining each bracket to 1e-12. Returns infinity when no zero is seen.
pub fn singular_time_by_det_sampling(
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    horizon: f64,
    step: f64,
) -> f64 {
    if c0.dim() == 0 {
        return f64::INFINITY;
    }
    let samples = (horizon / step).ceil() as usize;
    let mut prev2 = (0.0, det_at(c, c0, 0.0));
    let mut prev = prev2;
    for k in 1..=samples {
        let t = (k as f64 * step).min(horizon);
        let d = det_at(c, c0, t);
        if d == 0.0 {
            return t;
        }
        if (d > 0.0) != (prev.1 > 0.0) {
            return bisect_sign_change(c, c0, prev.0, t);
        }
        if k >= 2 && prev.1.abs() < prev2.1.abs() && prev.1.abs() <= d.abs() {
            if let Some(root) = touching_root(c, c0, prev2.0, t) {
                return root;
            }
        }
        prev2 = prev;
        prev = (t, d);
    }
    f64::INFINITY
}
