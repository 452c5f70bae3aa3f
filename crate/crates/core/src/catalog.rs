//! Exact model configurations with known geometry, used as ground truth.
//!
//! Entries store tensor data only: the full `n×n` shape operators, an
//! orthonormal conullity basis and the splitting tensors of an orthonormal
//! nullity basis.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_splitting_spectrum, decay_report, sign_balance_check, Behavior};
use crate::error::{NullityError, Result};
use crate::evolution::{is_codazzi_compatible, shape_operator_at};
use crate::linalg::{self, Matrix};
use crate::matrix_serde;
use crate::tensor::{GeodesicDomain, NullityProfile, ShapeOperatorSet, SpaceFormCurvature, SplittingTensor};
use crate::theorems::{
    cylinder_split, integrable_conullity_classify, scalar_curvature, CylinderSample, SplittingFamily,
};

/// Absolute tolerance for the closed-form identities below.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Principal curvatures closer than this are treated as one.
const MULTIPLICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum ExpectedProperty {
    TotallyGeodesic,
    ScalarCurvature { value: f64 },
    NullityIndex { nu: usize },
    /// Product of the largest and smallest principal curvature.
    PrincipalCurvatureProduct { value: f64 },
    /// `λ_i λ_j > 0` for all pairs of principal directions.
    PositiveExtrinsicCurvature,
    /// `|α(X, ·)| >= lower` for every unit `X`.
    BoundedAwayFromZero { lower: f64 },
    /// `c + λ²` for the largest and smallest principal curvature.
    GaussFactorCurvatures { sphere_factor: f64, hyperbolic_factor: f64 },
    Minimal,
    CartanIdentity,
    SignBalanced,
    ConsistentOnFullCircle,
    ConstantPrincipalCurvaturesAlongNullity,
    CodazziCompatible,
    CylinderSplits,
    MustBeCylinder,
    ParallelAlongNullity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub property: ExpectedProperty,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSubmanifold {
    pub name: String,
    pub profile: NullityProfile,
    pub c: SpaceFormCurvature,
    /// Full `n×n` shape operators.
    pub shape: ShapeOperatorSet,
    /// Orthonormal conullity basis, `n×q`.
    #[serde(with = "matrix_serde::row_major")]
    pub conullity: Matrix,
    pub splitting_family: SplittingFamily,
    pub expected_properties: Vec<ExpectedProperty>,
}

fn diag(v: &[f64]) -> Matrix {
    Matrix::from_diagonal(&DVector::from_vec(v.to_vec()))
}

fn coordinate_frame(n: usize, axes: &[usize]) -> Matrix {
    let mut q = Matrix::zeros(n, axes.len());
    for (j, &i) in axes.iter().enumerate() {
        q[(i, j)] = 1.0;
    }
    q
}

fn distinct(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &v in values {
        if out.last().is_none_or(|&last| (v - last).abs() > MULTIPLICITY_TOL) {
            out.push(v);
        }
    }
    out
}

/// `Σ_{j≠i} (c + λ_i λ_j) / (λ_i - λ_j)` for each distinct principal
/// curvature `λ_i`; zero for isoparametric hypersurfaces of the unit sphere.
pub fn cartan_identity_residuals(distinct_curvatures: &[f64], c: f64) -> Vec<f64> {
    distinct_curvatures
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            distinct_curvatures
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &lj)| (c + li * lj) / (li - lj))
                .sum()
        })
        .collect()
}

impl ModelSubmanifold {
    /// Shape operators restricted to the conullity, `Qᵀ A Q`.
    pub fn conullity_shape(&self) -> ShapeOperatorSet {
        let q = &self.conullity;
        ShapeOperatorSet::new_unchecked(self.shape.ops().iter().map(|a| q.transpose() * a * q).collect())
    }

    /// Ascending eigenvalues of each shape operator.
    pub fn principal_curvatures(&self) -> Vec<Vec<f64>> {
        self.shape.ops().iter().map(linalg::symmetric_eigenvalues).collect()
    }

    fn hypersurface_curvatures(&self) -> Result<Vec<f64>> {
        match self.principal_curvatures().as_slice() {
            [only] => Ok(only.clone()),
            other => Err(NullityError::PreconditionViolated(format!(
                "property defined for hypersurfaces, got codimension {}",
                other.len()
            ))),
        }
    }

    /// Checks every expected property in order.
    pub fn verify(&self) -> Vec<PropertyCheck> {
        self.expected_properties
            .iter()
            .map(|p| {
                let (passed, detail) = match self.check(p) {
                    Ok(out) => out,
                    Err(e) => (false, e.to_string()),
                };
                PropertyCheck { property: p.clone(), passed, detail }
            })
            .collect()
    }

    fn check(&self, property: &ExpectedProperty) -> Result<(bool, String)> {
        let n = self.profile.n;
        Ok(match *property {
            ExpectedProperty::TotallyGeodesic => {
                let m = self.shape.max_abs();
                (m == 0.0, format!("max |A| = {m:e}"))
            }
            ExpectedProperty::ScalarCurvature { value } => {
                let s = scalar_curvature(&self.shape, n, self.c)?;
                ((s - value).abs() <= IDENTITY_TOL, format!("s = {s}, expected {value}"))
            }
            ExpectedProperty::NullityIndex { nu } => {
                let kernel = self.shape.joint_kernel().ncols();
                let kernel = if self.shape.is_empty() { n } else { kernel };
                (kernel == nu && self.profile.nu == nu, format!("kernel dimension {kernel}, expected {nu}"))
            }
            ExpectedProperty::PrincipalCurvatureProduct { value } => {
                let k = self.hypersurface_curvatures()?;
                let product = k[0] * k[k.len() - 1];
                ((product - value).abs() <= IDENTITY_TOL, format!("product {product}, expected {value}"))
            }
            ExpectedProperty::PositiveExtrinsicCurvature => {
                let k = self.hypersurface_curvatures()?;
                let worst = (0..k.len())
                    .flat_map(|i| ((i + 1)..k.len()).map(move |j| (i, j)))
                    .map(|(i, j)| k[i] * k[j])
                    .fold(f64::INFINITY, f64::min);
                (worst > 0.0, format!("smallest pairwise product {worst}"))
            }
            ExpectedProperty::BoundedAwayFromZero { lower } => {
                let mut stacked = Matrix::zeros(n * self.shape.len(), n);
                for (i, a) in self.shape.ops().iter().enumerate() {
                    stacked.view_mut((i * n, 0), (n, n)).copy_from(a);
                }
                let smallest = linalg::singular_values(&stacked).last().copied().unwrap_or(0.0);
                (smallest >= lower - IDENTITY_TOL && smallest > 0.0, format!("inf |α(X,·)| = {smallest}"))
            }
            ExpectedProperty::GaussFactorCurvatures { sphere_factor, hyperbolic_factor } => {
                let k = self.hypersurface_curvatures()?;
                let c = self.c.value();
                let (top, bottom) = (c + k[k.len() - 1].powi(2), c + k[0].powi(2));
                let ok = (top - sphere_factor).abs() <= IDENTITY_TOL && (bottom - hyperbolic_factor).abs() <= IDENTITY_TOL;
                (ok, format!("factor curvatures {top}, {bottom}"))
            }
            ExpectedProperty::Minimal => {
                let worst = self.shape.ops().iter().map(|a| a.trace().abs()).fold(0.0, f64::max);
                (worst <= IDENTITY_TOL, format!("max |trace| = {worst:e}"))
            }
            ExpectedProperty::CartanIdentity => {
                let k = distinct(&self.hypersurface_curvatures()?);
                let residuals = cartan_identity_residuals(&k, self.c.value());
                let worst = residuals.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
                (worst <= IDENTITY_TOL, format!("max residual {worst:e}"))
            }
            ExpectedProperty::SignBalanced => {
                let a = self.conullity_shape();
                let mut ok = true;
                for member in self.splitting_family.basis() {
                    ok &= sign_balance_check(&a, self.c, member)?;
                }
                (ok, format!("{} splitting tensors", self.splitting_family.len()))
            }
            ExpectedProperty::ConsistentOnFullCircle => {
                let b = std::f64::consts::PI / self.c.sqrt_abs();
                let domain = GeodesicDomain::segment(b)?;
                let mut ok = true;
                for member in self.splitting_family.basis() {
                    ok &= classify_splitting_spectrum(self.c, member, domain)?.consistent;
                }
                (ok, format!("segment b = {b}"))
            }
            ExpectedProperty::ConstantPrincipalCurvaturesAlongNullity => {
                let a0 = self.conullity_shape();
                let start: Vec<Vec<f64>> = a0.ops().iter().map(linalg::symmetric_eigenvalues).collect();
                let mut worst = 0.0_f64;
                for member in self.splitting_family.basis() {
                    for t in [0.3, 1.0, 2.0, 2.9] {
                        let a = shape_operator_at(&a0, self.c, member, t)?;
                        for (op, want) in a.ops().iter().zip(&start) {
                            for (x, y) in linalg::symmetric_eigenvalues(op).iter().zip(want) {
                                worst = worst.max((x - y).abs());
                            }
                        }
                    }
                }
                (worst <= 1e-10, format!("max eigenvalue drift {worst:e}"))
            }
            ExpectedProperty::CodazziCompatible => {
                let a = self.conullity_shape();
                let ok = self.splitting_family.basis().iter().all(|m| is_codazzi_compatible(&a, m));
                (ok, format!("{} splitting tensors", self.splitting_family.len()))
            }
            ExpectedProperty::CylinderSplits => {
                let kappa = self.shape.ops().first().map_or(0.0, |a| a[(0, 0)]);
                let samples = euclidean_cylinder_samples(n, kappa)?;
                let split = cylinder_split(&samples, n - 1)?;
                (split.residual <= 1e-10, format!("residual {:e}", split.residual))
            }
            ExpectedProperty::MustBeCylinder => {
                let verdict = integrable_conullity_classify(self.c, &self.splitting_family)?;
                (verdict.holds(), format!("{verdict:?}"))
            }
            ExpectedProperty::ParallelAlongNullity => {
                let a = self.conullity_shape();
                let mut ok = true;
                for member in self.splitting_family.basis() {
                    let report = decay_report(&a, self.c, member, GeodesicDomain::Ray)?;
                    ok &= report
                        .per_block
                        .iter()
                        .all(|b| matches!(b.behavior, Behavior::ParallelConstant | Behavior::IdenticallyZero));
                }
                (ok, "blocks along each nullity ray".into())
            }
        })
    }
}

/// `f ≡ const`: every direction is a nullity direction.
pub fn totally_geodesic(n: usize, p: usize, c: SpaceFormCurvature) -> Result<ModelSubmanifold> {
    Ok(ModelSubmanifold {
        name: format!("totally_geodesic(n={n}, p={p}, c={})", c.value()),
        profile: NullityProfile::new(n, p, n)?,
        c,
        shape: ShapeOperatorSet::zeros(n, p),
        conullity: Matrix::zeros(n, 0),
        splitting_family: SplittingFamily::new(0, vec![SplittingTensor::zero(0); n])?,
        expected_properties: vec![
            ExpectedProperty::TotallyGeodesic,
            ExpectedProperty::ScalarCurvature { value: c.value() },
            ExpectedProperty::NullityIndex { nu: n },
        ],
    })
}

/// Isoparametric hypersurface `S^k(ρ) × H^{n-k}(√(1+ρ²))` of hyperbolic space
/// with principal curvatures `√(1+ρ²)/ρ` (multiplicity `k`) and `ρ/√(1+ρ²)`.
pub fn hyperbolic_cylinder(k: usize, n: usize, rho: f64) -> Result<ModelSubmanifold> {
    if k == 0 || k + 1 > n {
        return Err(NullityError::InvalidArgument(format!("need 1 <= k <= n-1, got k = {k}, n = {n}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(NullityError::InvalidArgument(format!("radius must be positive, got {rho}")));
    }
    let root = (1.0 + rho * rho).sqrt();
    let (ls, lh) = (root / rho, rho / root);
    let mut curvatures = vec![ls; k];
    curvatures.extend(std::iter::repeat_n(lh, n - k));
    let (kf, nf) = (k as f64, n as f64);
    let scalar = (kf * (kf - 1.0) / (rho * rho) - (nf - kf) * (nf - kf - 1.0) / (1.0 + rho * rho)) / (nf * (nf - 1.0));
    Ok(ModelSubmanifold {
        name: format!("hyperbolic_cylinder(k={k}, n={n}, rho={rho})"),
        profile: NullityProfile::new(n, 1, 0)?,
        c: SpaceFormCurvature::HYPERBOLIC,
        shape: ShapeOperatorSet::new(n, vec![diag(&curvatures)])?,
        conullity: Matrix::identity(n, n),
        splitting_family: SplittingFamily::new(n, Vec::new())?,
        expected_properties: vec![
            ExpectedProperty::NullityIndex { nu: 0 },
            ExpectedProperty::PrincipalCurvatureProduct { value: 1.0 },
            ExpectedProperty::PositiveExtrinsicCurvature,
            ExpectedProperty::BoundedAwayFromZero { lower: lh },
            ExpectedProperty::GaussFactorCurvatures {
                sphere_factor: 1.0 / (rho * rho),
                hyperbolic_factor: -1.0 / (1.0 + rho * rho),
            },
            ExpectedProperty::ScalarCurvature { value: scalar },
        ],
    })
}

/// Minimal isoparametric hypersurface of `S^4` with principal curvatures
/// `√3, 0, -√3`, seen as the polar map of the Veronese surface; the nullity
/// is the middle principal direction.
///
/// The splitting tensor along the nullity is not given in closed form by the
/// classical description. The one stored here is forced by two constraints:
/// the principal curvatures stay constant along the nullity circle, and `A C`
/// must be symmetric. In the frame `{e1, e3}` these leave `[[0, 1], [-1, 0]]`.
pub fn cartan_veronese_polar() -> Result<ModelSubmanifold> {
    let r3 = 3.0_f64.sqrt();
    Ok(ModelSubmanifold {
        name: "cartan_veronese_polar".into(),
        profile: NullityProfile::new(3, 1, 1)?,
        c: SpaceFormCurvature::SPHERE,
        shape: ShapeOperatorSet::new(3, vec![diag(&[r3, 0.0, -r3])])?,
        conullity: coordinate_frame(3, &[0, 2]),
        splitting_family: SplittingFamily::new(2, vec![SplittingTensor::from_row_slice(2, &[0.0, 1.0, -1.0, 0.0])])?,
        expected_properties: vec![
            ExpectedProperty::NullityIndex { nu: 1 },
            ExpectedProperty::Minimal,
            ExpectedProperty::CartanIdentity,
            ExpectedProperty::ScalarCurvature { value: 0.0 },
            ExpectedProperty::CodazziCompatible,
            ExpectedProperty::ConsistentOnFullCircle,
            ExpectedProperty::SignBalanced,
            ExpectedProperty::ConstantPrincipalCurvaturesAlongNullity,
        ],
    })
}

/// Cylinder over a plane circle of curvature `kappa` in `R^{n+1}`.
pub fn euclidean_cylinder(n: usize, kappa: f64) -> Result<ModelSubmanifold> {
    if n < 2 {
        return Err(NullityError::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(NullityError::InvalidArgument(format!("curvature must be finite and nonzero, got {kappa}")));
    }
    let mut curvatures = vec![0.0; n];
    curvatures[0] = kappa;
    Ok(ModelSubmanifold {
        name: format!("euclidean_cylinder(n={n}, kappa={kappa})"),
        profile: NullityProfile::new(n, 1, n - 1)?,
        c: SpaceFormCurvature::EUCLIDEAN,
        shape: ShapeOperatorSet::new(n, vec![diag(&curvatures)])?,
        conullity: coordinate_frame(n, &[0]),
        splitting_family: SplittingFamily::new(1, vec![SplittingTensor::zero(1); n - 1])?,
        expected_properties: vec![
            ExpectedProperty::NullityIndex { nu: n - 1 },
            ExpectedProperty::ScalarCurvature { value: 0.0 },
            ExpectedProperty::CodazziCompatible,
            ExpectedProperty::MustBeCylinder,
            ExpectedProperty::ParallelAlongNullity,
            ExpectedProperty::CylinderSplits,
        ],
    })
}

/// Exact points of the circle-of-curvature-`kappa` cylinder in `R^{n+1}`:
/// 12 points on the circle, each with 3 offsets along the `n-1` rulings.
pub fn euclidean_cylinder_samples(n: usize, kappa: f64) -> Result<Vec<CylinderSample>> {
    if n < 2 || kappa == 0.0 {
        return Err(NullityError::InvalidArgument(format!("need n >= 2 and kappa != 0, got {n}, {kappa}")));
    }
    let m = n + 1;
    let radius = 1.0 / kappa.abs();
    let rulings = coordinate_frame(m, &(2..m).collect::<Vec<_>>());
    let mut samples = Vec::new();
    for i in 0..12 {
        let theta = std::f64::consts::TAU * i as f64 / 12.0;
        for (j, offset) in [-1.0, 0.5, 2.0].into_iter().enumerate() {
            let mut point = DVector::zeros(m);
            point[0] = radius * theta.cos();
            point[1] = radius * theta.sin();
            for r in 2..m {
                point[r] = offset * (r - 1 + j) as f64;
            }
            samples.push(CylinderSample { point, nullity_basis: rulings.clone(), leaf: Some(i) });
        }
    }
    Ok(samples)
}
