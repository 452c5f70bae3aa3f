use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{NullityError, Result};
use crate::linalg::{self, Matrix};

/// Largest principal angle tolerated between sampled nullity images.
pub const CONSTANT_SUBSPACE_TOL: f64 = 1e-8;

/// A sampled point of the immersion together with the image of the nullity
/// distribution there (columns of `nullity_basis`, `m×k`). Samples sharing a
/// `leaf` label lie on the same nullity leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderSample {
    pub point: DVector<f64>,
    pub nullity_basis: Matrix,
    pub leaf: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderSplit {
    /// Orthonormal basis of the common nullity image, `m×k`.
    #[serde(with = "crate::matrix_serde::row_major")]
    pub axis: Matrix,
    /// Components orthogonal to the axis, one per sample.
    pub base_points: Vec<Vec<f64>>,
    /// Axis coordinates, one per sample.
    pub fiber_coords: Vec<Vec<f64>>,
    pub residual: f64,
    pub max_principal_angle: f64,
}

fn orthonormal_span(basis: &Matrix, k: usize) -> Result<Matrix> {
    let q = linalg::orthonormalize(basis)
        .ok_or_else(|| NullityError::InvalidArgument("nullity basis is rank deficient".into()))?;
    debug_assert_eq!(q.ncols(), k);
    Ok(q)
}

/// Largest principal angle between the column spans of two orthonormal
/// `m×k` frames.
pub fn max_principal_angle(q1: &Matrix, q2: &Matrix) -> f64 {
    let m = q1.nrows();
    let residual = (Matrix::identity(m, m) - q1 * q1.transpose()) * q2;
    linalg::spectral_norm(&residual).clamp(0.0, 1.0).asin()
}

/// Checks that the nullity images agree at every sample and splits each point
/// into its component orthogonal to the common axis and its axis coordinates.
pub fn cylinder_split(samples: &[CylinderSample], k: usize) -> Result<CylinderSplit> {
    let first = samples
        .first()
        .ok_or_else(|| NullityError::InvalidArgument("cylinder split needs at least one sample".into()))?;
    let m = first.point.len();
    if k == 0 || k > m {
        return Err(NullityError::InvalidArgument(format!("need 1 <= k <= {m}, got k = {k}")));
    }
    let mut frames = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        if s.point.len() != m || s.nullity_basis.shape() != (m, k) {
            return Err(NullityError::DimensionMismatch(format!(
                "sample {i}: point of length {} with a {}x{} basis, expected {m} and {m}x{k}",
                s.point.len(),
                s.nullity_basis.nrows(),
                s.nullity_basis.ncols()
            )));
        }
        frames.push(orthonormal_span(&s.nullity_basis, k)?);
    }

    let worst = frames.iter().map(|q| max_principal_angle(&frames[0], q)).fold(0.0, f64::max);
    if worst > CONSTANT_SUBSPACE_TOL {
        return Err(NullityError::NotConstant { max_angle: worst });
    }

    let mut gram = Matrix::zeros(m, m);
    for q in &frames {
        gram += q * q.transpose();
    }
    let axis = linalg::leading_left_singular_vectors(&gram, k);
    let projector = &axis * axis.transpose();

    let mut base_points = Vec::with_capacity(samples.len());
    let mut fiber_coords = Vec::with_capacity(samples.len());
    let mut residual = 0.0_f64;
    for s in samples {
        let along = &projector * &s.point;
        let base = &s.point - &along;
        let fiber = axis.transpose() * &s.point;
        residual = residual.max((&base + &axis * &fiber - &s.point).amax());
        base_points.push(base.iter().copied().collect::<Vec<f64>>());
        fiber_coords.push(fiber.iter().copied().collect::<Vec<f64>>());
    }

    let mut leaves: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        let Some(leaf) = s.leaf else { continue };
        let anchor = *leaves.entry(leaf).or_insert(i);
        let spread = base_points[i]
            .iter()
            .zip(&base_points[anchor])
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        residual = residual.max(spread);
    }

    Ok(CylinderSplit { axis, base_points, fiber_coords, residual, max_principal_angle: worst })
}
