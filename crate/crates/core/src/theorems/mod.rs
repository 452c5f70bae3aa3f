//! Dimension thresholds, the special-direction search over a family of
//! splitting tensors, the scalar-curvature chain and the cylinder results.

mod conullity;
mod curvature;
mod cylinder;
mod direction;
mod thresholds;

pub use conullity::{integrable_conullity_classify, ConullityVerdict};
pub use curvature::{
    alpha_norm, alpha_operator_norm, mean_curvature_norm, minimality_certificate, pad_to_tangent, scalar_curvature,
    MinimalityVerdict, MEAN_CURVATURE_DRIFT_TOL, VANISHING_ALPHA_TOL,
};
pub use cylinder::{cylinder_split, max_principal_angle, CylinderSample, CylinderSplit, CONSTANT_SUBSPACE_TOL};
pub use direction::{
    find_special_nullity_direction, theorem1_pipeline, SpecialDirection, SplittingFamily, Theorem1Report,
};
pub use thresholds::{
    florit_bound, nu_n, radon_hurwitz, sphere_rigidity_threshold, sphere_totally_geodesic_by_nonpositive_extrinsic,
    theorem1_applicable, theorem2_applicable, theorem2_chain_holds,
};
