//! Tensor data living on the conullity of a nullity geodesic, expressed in a
//! parallel orthonormal frame.

use serde::{Deserialize, Serialize};

use crate::error::{NullityError, Result};
use crate::linalg::{self, Matrix};
use crate::matrix_serde;

/// Which closed form of the Jacobi tensor applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureBranch {
    Spherical,
    Flat,
    Hyperbolic,
}

/// Constant sectional curvature `c` of the ambient space form.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SpaceFormCurvature(f64);

impl SpaceFormCurvature {
    pub const SPHERE: Self = Self(1.0);
    pub const EUCLIDEAN: Self = Self(0.0);
    pub const HYPERBOLIC: Self = Self(-1.0);

    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() {
            Ok(Self(c))
        } else {
            Err(NullityError::InvalidArgument(format!("curvature must be finite, got {c}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `√|c|`.
    pub fn sqrt_abs(self) -> f64 {
        self.0.abs().sqrt()
    }

    pub fn branch(self) -> CurvatureBranch {
        if self.0 > 0.0 {
            CurvatureBranch::Spherical
        } else if self.0 < 0.0 {
            CurvatureBranch::Hyperbolic
        } else {
            CurvatureBranch::Flat
        }
    }
}

impl TryFrom<f64> for SpaceFormCurvature {
    type Error = NullityError;
    fn try_from(c: f64) -> Result<Self> {
        Self::new(c)
    }
}

impl From<SpaceFormCurvature> for f64 {
    fn from(c: SpaceFormCurvature) -> f64 {
        c.0
    }
}

/// Dimensions of a configuration: intrinsic dimension `n`, codimension `p`,
/// nullity index `nu` and conullity index `q = n - nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullityProfile {
    pub n: usize,
    pub p: usize,
    pub nu: usize,
    pub q: usize,
}

impl NullityProfile {
    pub fn new(n: usize, p: usize, nu: usize) -> Result<Self> {
        if n == 0 {
            return Err(NullityError::InvalidArgument("dimension n must be at least 1".into()));
        }
        if nu > n {
            return Err(NullityError::InvalidArgument(format!("nullity {nu} exceeds dimension {n}")));
        }
        Ok(Self { n, p, nu, q: n - nu })
    }
}

/// The splitting tensor `C_T` of a nullity direction, an endomorphism of the
/// conullity. Not assumed symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SplittingTensor(#[serde(with = "matrix_serde::row_major")] Matrix);

impl SplittingTensor {
    pub fn new(mat: Matrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(NullityError::DimensionMismatch(format!(
                "splitting tensor must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self(mat))
    }

    pub fn from_row_slice(q: usize, data: &[f64]) -> Self {
        Self(Matrix::from_row_slice(q, q, data))
    }

    pub fn zero(q: usize) -> Self {
        Self(Matrix::zeros(q, q))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// Shape operators `A_ξ` restricted to a common space, one per vector of a
/// parallel orthonormal normal frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShapeOperatorSet {
    #[serde(with = "matrix_serde::row_major_list")]
    ops: Vec<Matrix>,
}

impl ShapeOperatorSet {
    /// Validates squareness, a common dimension `dim` and symmetry.
    pub fn new(dim: usize, ops: Vec<Matrix>) -> Result<Self> {
        for (i, a) in ops.iter().enumerate() {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(NullityError::DimensionMismatch(format!(
                    "shape operator {i} is {}x{}, expected {dim}x{dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            let asymmetry = linalg::relative_asymmetry(a);
            if asymmetry > linalg::SYMMETRY_TOL {
                return Err(NullityError::NotSymmetric { index: i, asymmetry });
            }
        }
        Ok(Self { ops })
    }

    /// Wraps operators produced by propagation without the symmetry check;
    /// incompatible initial data legitimately yields asymmetric results.
    pub fn new_unchecked(ops: Vec<Matrix>) -> Self {
        Self { ops }
    }

    pub fn zeros(dim: usize, count: usize) -> Self {
        Self { ops: vec![Matrix::zeros(dim, dim); count] }
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Common dimension, or `None` for an empty set.
    pub fn dim(&self) -> Option<usize> {
        self.ops.first().map(Matrix::nrows)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.ops.iter().map(linalg::relative_asymmetry).fold(0.0, f64::max)
    }

    /// Largest absolute entry over all operators.
    pub fn max_abs(&self) -> f64 {
        self.ops.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Joint kernel `⋂ ker A_ξ` as orthonormal columns.
    pub fn joint_kernel(&self) -> Matrix {
        match self.dim() {
            None => Matrix::zeros(0, 0),
            Some(d) => {
                let mut stacked = Matrix::zeros(d * self.ops.len(), d);
                for (i, a) in self.ops.iter().enumerate() {
                    stacked.view_mut((i * d, 0), (d, d)).copy_from(a);
                }
                linalg::kernel_basis(&stacked, linalg::RANK_TOL)
            }
        }
    }
}

/// Maximal domain of a unit-speed nullity geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeodesicDomain {
    /// `[0, b)` with `0 < b < ∞`.
    Segment { b: f64 },
    /// `[0, ∞)`.
    Ray,
    /// `(-∞, ∞)`.
    Line,
}

impl GeodesicDomain {
    pub fn segment(b: f64) -> Result<Self> {
        if b > 0.0 && b.is_finite() {
            Ok(Self::Segment { b })
        } else {
            Err(NullityError::InvalidArgument(format!("segment length must be in (0, ∞), got {b}")))
        }
    }

    /// Forward length of the domain.
    pub fn forward_length(&self) -> f64 {
        match *self {
            Self::Segment { b } => b,
            Self::Ray | Self::Line => f64::INFINITY,
        }
    }

    pub fn is_complete_forward(&self) -> bool {
        !matches!(self, Self::Segment { .. })
    }
}
