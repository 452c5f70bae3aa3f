use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_splitting_spectrum, decay_report, DecayReport};
use crate::error::{NullityError, Result};
use crate::linalg::{self, Matrix};
use crate::matrix_serde;
use crate::tensor::{CurvatureBranch, GeodesicDomain, ShapeOperatorSet, SpaceFormCurvature, SplittingTensor};

/// Singular values of the symmetric-traceless map below this fraction of the
/// largest one span its kernel.
const KERNEL_TOL: f64 = 1e-10;

/// Splitting tensors `C_{T_i}` of an orthonormal basis `T_1..T_ν` of the
/// nullity at one point. `T ↦ C_T` is linear, so the family determines it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingFamily {
    basis: Vec<SplittingTensor>,
    q: usize,
}

impl SplittingFamily {
    pub fn new(q: usize, basis: Vec<SplittingTensor>) -> Result<Self> {
        if let Some(bad) = basis.iter().position(|c| c.dim() != q) {
            return Err(NullityError::DimensionMismatch(format!(
                "family member {bad} is {d}x{d}, expected {q}x{q}",
                d = basis[bad].dim()
            )));
        }
        Ok(Self { basis, q })
    }

    pub fn basis(&self) -> &[SplittingTensor] {
        &self.basis
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Nullity index `ν0`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `C_T` for `T = Σ coeffs[i] T_i`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<SplittingTensor> {
        if coeffs.len() != self.basis.len() {
            return Err(NullityError::DimensionMismatch(format!(
                "{} coefficients for a family of {}",
                coeffs.len(),
                self.basis.len()
            )));
        }
        let mut out = Matrix::zeros(self.q, self.q);
        for (x, c) in coeffs.iter().zip(&self.basis) {
            out += c.matrix() * *x;
        }
        SplittingTensor::new(out)
    }
}

/// A unit nullity direction `T0` with `C_{T0} = -S - λI`, `S` skew.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialDirection {
    pub coeffs: Vec<f64>,
    #[serde(with = "matrix_serde::row_major")]
    pub skew_part: Matrix,
    /// Normalized so that `lambda <= 0`.
    pub lambda: f64,
    pub splitting: SplittingTensor,
    /// `max |C_{T0} + S + λI|`.
    pub residual: f64,
}

/// Symmetric-traceless part flattened isometrically (off-diagonal entries
/// weighted by √2). The redundant trace coordinate does not change the kernel.
fn sym_traceless_coords(c: &Matrix) -> Vec<f64> {
    let q = c.nrows();
    let mut p = linalg::symmetric_part(c);
    if q > 0 {
        let mean = p.trace() / q as f64;
        for i in 0..q {
            p[(i, i)] -= mean;
        }
    }
    let mut out = Vec::with_capacity(q * (q + 1) / 2);
    for i in 0..q {
        out.push(p[(i, i)]);
        for j in (i + 1)..q {
            out.push(std::f64::consts::SQRT_2 * p[(i, j)]);
        }
    }
    out
}

fn decompose(family: &SplittingFamily, coeffs: Vec<f64>) -> Result<SpecialDirection> {
    let splitting = family.combine(&coeffs)?;
    let c = splitting.matrix();
    let q = family.q();
    let lambda = if q == 0 { 0.0 } else { -c.trace() / q as f64 };
    // Adding 0.0 turns the -0.0 entries of a negated zero diagonal into 0.0.
    let skew_part = (-linalg::skew_part(c)).add_scalar(0.0);
    let residual = linalg::max_abs(&(c + &skew_part + Matrix::identity(q, q) * lambda));
    Ok(SpecialDirection { coeffs, skew_part, lambda, splitting, residual })
}

/// Searches the nullity for a direction whose splitting tensor lies in
/// `Skew ⊕ span{I}`, i.e. the kernel of `T ↦ sym-traceless(C_T)`. The sign is
/// chosen so that `λ <= 0`; when `λ` vanishes the first nonzero coefficient
/// is made positive.
pub fn find_special_nullity_direction(family: &SplittingFamily) -> Option<SpecialDirection> {
    let nu0 = family.len();
    if nu0 == 0 {
        return None;
    }
    let rows = family.q() * (family.q() + 1) / 2;
    let mut map = Matrix::zeros(rows, nu0);
    for (j, c) in family.basis().iter().enumerate() {
        map.set_column(j, &DVector::from_vec(sym_traceless_coords(c.matrix())));
    }
    let kernel = linalg::kernel_basis(&map, KERNEL_TOL);
    if kernel.ncols() == 0 {
        return None;
    }
    let mut coeffs: Vec<f64> = kernel.column(0).iter().copied().collect();
    let mut dir = decompose(family, coeffs.clone()).ok()?;
    let scale = 1.0 + linalg::max_abs(dir.splitting.matrix());
    let flip = if dir.lambda.abs() <= 1e-12 * scale {
        coeffs.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0)
    } else {
        dir.lambda > 0.0
    };
    if flip {
        coeffs.iter_mut().for_each(|x| *x = -*x);
        dir = decompose(family, coeffs).ok()?;
    }
    if dir.lambda > 0.0 {
        // Only reachable for |λ| at rounding level.
        dir.lambda = 0.0;
    }
    Some(dir)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub direction: SpecialDirection,
    /// The geodesic runs along `-T0` instead of `T0`.
    pub reversed: bool,
    /// `λ = -√-c` up to 1e-12: the forward spectrum touches the critical value.
    pub boundary_case: bool,
    pub decay: DecayReport,
}

/// Finds a special direction and reports the shape operators along the ray it
/// generates. `T0` is walked forward unless `√-c` is an eigenvalue of `C_{T0}`
/// or its real spectrum rules out a ray, in which case `-T0` is used.
pub fn theorem1_pipeline(
    family: &SplittingFamily,
    a0: &ShapeOperatorSet,
    c: SpaceFormCurvature,
) -> Result<Theorem1Report> {
    if c.branch() == CurvatureBranch::Spherical {
        return Err(NullityError::PreconditionViolated("the special-direction pipeline needs c <= 0".into()));
    }
    let direction = find_special_nullity_direction(family).ok_or(NullityError::NoDirection)?;
    let s = c.sqrt_abs();
    let forward = direction.splitting.clone();
    let backward = SplittingTensor::new(-forward.matrix())?;

    let avoids_critical = |ct: &SplittingTensor| -> Result<bool> {
        Ok(linalg::spectrum(ct.matrix())?
            .iter()
            .all(|z| (z - num_complex::Complex64::new(s, 0.0)).norm() > 1e-10 * (1.0 + s)))
    };
    let ray_ok = |ct: &SplittingTensor| -> Result<bool> {
        Ok(classify_splitting_spectrum(c, ct, GeodesicDomain::Ray)?.consistent)
    };

    let mut choice = None;
    for (reversed, ct) in [(false, &forward), (true, &backward)] {
        if ray_ok(ct)? && avoids_critical(ct)? {
            choice = Some((reversed, ct));
            break;
        }
    }
    if choice.is_none() {
        for (reversed, ct) in [(false, &forward), (true, &backward)] {
            if ray_ok(ct)? {
                choice = Some((reversed, ct));
                break;
            }
        }
    }
    let (reversed, ct) = choice.ok_or_else(|| {
        NullityError::InconsistentSpectrum("neither orientation of the special direction admits a ray".into())
    })?;
    let decay = decay_report(a0, c, ct, GeodesicDomain::Ray)?;
    let boundary_case = (direction.lambda + s).abs() <= 1e-12;
    Ok(Theorem1Report { direction, reversed, boundary_case, decay })
}
