use serde::{Deserialize, Serialize};

use super::direction::SplittingFamily;
use crate::error::{NullityError, Result};
use crate::linalg;
use crate::tensor::{CurvatureBranch, SpaceFormCurvature};

/// Entries below this count as zero when checking a flat-space family.
const FAMILY_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum ConullityVerdict {
    MustBeTotallyGeodesic,
    /// `family_vanishes` is the check that every splitting tensor is zero.
    MustBeCylinder { family_vanishes: bool, max_entry: f64 },
    /// Eigenvalues of the (symmetric) splitting tensors against `[-bound, bound]`.
    LeafBound { bound: f64, satisfied: bool, extreme_eigenvalue: f64 },
}

impl ConullityVerdict {
    pub fn holds(&self) -> bool {
        match *self {
            ConullityVerdict::MustBeTotallyGeodesic => true,
            ConullityVerdict::MustBeCylinder { family_vanishes, .. } => family_vanishes,
            ConullityVerdict::LeafBound { satisfied, .. } => satisfied,
        }
    }
}

/// Structure forced on an immersion whose conullity is integrable, which is
/// the case exactly when every splitting tensor is self-adjoint.
pub fn integrable_conullity_classify(c: SpaceFormCurvature, family: &SplittingFamily) -> Result<ConullityVerdict> {
    for (index, member) in family.basis().iter().enumerate() {
        let asymmetry = linalg::relative_asymmetry(member.matrix());
        if asymmetry > linalg::SYMMETRY_TOL {
            return Err(NullityError::NotIntegrable { index, asymmetry });
        }
    }
    Ok(match c.branch() {
        CurvatureBranch::Spherical => ConullityVerdict::MustBeTotallyGeodesic,
        CurvatureBranch::Flat => {
            let max_entry = family.basis().iter().map(|m| linalg::max_abs(m.matrix())).fold(0.0, f64::max);
            ConullityVerdict::MustBeCylinder { family_vanishes: max_entry <= FAMILY_ZERO_TOL, max_entry }
        }
        CurvatureBranch::Hyperbolic => {
            let bound = c.sqrt_abs();
            let extreme_eigenvalue = family
                .basis()
                .iter()
                .flat_map(|m| linalg::symmetric_eigenvalues(m.matrix()))
                .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            let satisfied = extreme_eigenvalue.abs() <= bound * (1.0 + 1e-12);
            ConullityVerdict::LeafBound { bound, satisfied, extreme_eigenvalue }
        }
    })
}
