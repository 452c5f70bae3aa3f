use serde::{Deserialize, Serialize};

use crate::error::{NullityError, Result};
use crate::linalg::{self, Matrix};
use crate::tensor::{ShapeOperatorSet, SpaceFormCurvature};

/// Allowed spread of `‖H‖` across samples for it to count as constant.
pub const MEAN_CURVATURE_DRIFT_TOL: f64 = 1e-8;

/// Below this the second fundamental form counts as having decayed.
pub const VANISHING_ALPHA_TOL: f64 = 1e-6;

fn check_tangent(a: &ShapeOperatorSet, n: usize) -> Result<()> {
    if n < 2 {
        return Err(NullityError::InvalidArgument(format!("dimension must be at least 2, got {n}")));
    }
    match a.dim() {
        Some(d) if d != n => Err(NullityError::DimensionMismatch(format!(
            "shape operators are {d}x{d}, expected full tangent space {n}x{n}"
        ))),
        _ => Ok(()),
    }
}

/// Embeds conullity operators (`q×q`) into the tangent space as `Q A Qᵀ`, where
/// the columns of `conullity` (`n×q`) are an orthonormal conullity basis.
pub fn pad_to_tangent(a: &ShapeOperatorSet, conullity: &Matrix) -> Result<ShapeOperatorSet> {
    if let Some(d) = a.dim() {
        if d != conullity.ncols() {
            return Err(NullityError::DimensionMismatch(format!(
                "{d}x{d} operators against a conullity basis with {} columns",
                conullity.ncols()
            )));
        }
    }
    let n = conullity.nrows();
    ShapeOperatorSet::new(n, a.ops().iter().map(|x| conullity * x * conullity.transpose()).collect())
}

/// `‖H‖ = (1/n) √(Σ_ξ (tr A_ξ)²)`.
pub fn mean_curvature_norm(a: &ShapeOperatorSet, n: usize) -> f64 {
    a.ops().iter().map(|x| x.trace().powi(2)).sum::<f64>().sqrt() / n as f64
}

/// `‖α‖ = √(Σ_ξ ‖A_ξ‖_F²)`.
pub fn alpha_norm(a: &ShapeOperatorSet) -> f64 {
    a.ops().iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

/// `sup_{|X|=1} ‖α(X, ·)‖` with the Hilbert–Schmidt norm on `Y ↦ α(X, Y)`,
/// i.e. the largest singular value of the stacked operators.
pub fn alpha_operator_norm(a: &ShapeOperatorSet) -> f64 {
    let Some(d) = a.dim() else { return 0.0 };
    let mut stacked = Matrix::zeros(d * a.len(), d);
    for (i, x) in a.ops().iter().enumerate() {
        stacked.view_mut((i * d, 0), (d, d)).copy_from(x);
    }
    linalg::spectral_norm(&stacked)
}

/// Normalized scalar curvature from the Gauss equation,
/// `s = c + n/(n-1) ‖H‖² - ‖α‖² / (n(n-1))`.
pub fn scalar_curvature(a: &ShapeOperatorSet, n: usize, c: SpaceFormCurvature) -> Result<f64> {
    check_tangent(a, n)?;
    let nf = n as f64;
    let h2 = mean_curvature_norm(a, n).powi(2);
    let a2 = alpha_norm(a).powi(2);
    Ok(c.value() + nf / (nf - 1.0) * h2 - a2 / (nf * (nf - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum MinimalityVerdict {
    /// `‖H‖` is constant and the second fundamental form decays, so `H ≡ 0`.
    Minimal { mean_curvature: f64, min_alpha_norm: f64 },
    Inconclusive { mean_curvature: f64, min_alpha_norm: f64 },
}

/// Combines constancy of `‖H‖` over samples with decay of `α`: a constant
/// `‖H‖` bounded by a vanishing `α` must itself vanish.
pub fn minimality_certificate(samples: &[ShapeOperatorSet], n: usize) -> Result<MinimalityVerdict> {
    if samples.is_empty() {
        return Err(NullityError::InvalidArgument("minimality certificate needs at least one sample".into()));
    }
    for s in samples {
        check_tangent(s, n)?;
    }
    let h: Vec<f64> = samples.iter().map(|s| mean_curvature_norm(s, n)).collect();
    let (lo, hi) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if hi - lo > MEAN_CURVATURE_DRIFT_TOL {
        return Err(NullityError::InconsistentInput(format!(
            "mean curvature length varies between {lo} and {hi}"
        )));
    }
    let mean_curvature = h.iter().sum::<f64>() / h.len() as f64;
    let min_alpha_norm = samples.iter().map(alpha_operator_norm).fold(f64::INFINITY, f64::min);
    Ok(if min_alpha_norm < VANISHING_ALPHA_TOL {
        MinimalityVerdict::Minimal { mean_curvature, min_alpha_norm }
    } else {
        MinimalityVerdict::Inconclusive { mean_curvature, min_alpha_norm }
    })
}
