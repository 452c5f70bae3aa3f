//! Spectral obstructions on the initial splitting tensor of a nullity geodesic
//! and the asymptotic behavior of the shape operators along it.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NullityError, Result};
use crate::evolution::{check_shape_dims, is_codazzi_compatible, shape_operator_at};
use crate::linalg::{self, Matrix};
use crate::matrix_serde;
use crate::tensor::{CurvatureBranch, GeodesicDomain, ShapeOperatorSet, SpaceFormCurvature, SplittingTensor};

/// Slack for closed-interval membership of real eigenvalues.
pub const INTERVAL_SLACK: f64 = 1e-10;

/// Arc lengths at which decay reports sample `‖A(t)X‖`.
pub const DECAY_SAMPLE_TIMES: [f64; 3] = [5.0, 10.0, 20.0];

/// The eigenvalue constraint applied to a (curvature, domain) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    /// `c > 0`, length at least `π/√c`: no real eigenvalues.
    I,
    /// `c ≤ 0` on a ray: real eigenvalues in `(-∞, √-c]`.
    II,
    /// `c = 0` on a line: the only real eigenvalue allowed is 0.
    II1,
    /// `c < 0` on a line: real eigenvalues in `[-√-c, √-c]`.
    II2,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::I => "(i)",
            Clause::II => "(ii)",
            Clause::II1 => "(ii.1)",
            Clause::II2 => "(ii.2)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RealInterval {
    pub const ALL: Self = Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Eigenvalue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumVerdict {
    pub consistent: bool,
    /// Clause checked for this (curvature, domain); `None` if none applies.
    pub applied_clause: Option<Clause>,
    pub violated_clause: Option<Clause>,
    pub offending_eigenvalues: Vec<Eigenvalue>,
    /// Where real eigenvalues may lie. `None` means no real eigenvalue is
    /// admissible at all.
    pub admissible_interval: Option<RealInterval>,
}

/// Checks the real spectrum of `C0` against the constraint that a nullity
/// geodesic with the given domain imposes. On a line the line clause is
/// applied directly, since it subsumes the ray clause.
pub fn classify_splitting_spectrum(
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    domain: GeodesicDomain,
) -> Result<SpectrumVerdict> {
    let s = c.sqrt_abs();
    let (clause, interval) = match (c.branch(), domain) {
        (CurvatureBranch::Spherical, d) if d.forward_length() >= std::f64::consts::PI / s => (Some(Clause::I), None),
        (CurvatureBranch::Spherical, _) | (_, GeodesicDomain::Segment { .. }) => (None, Some(RealInterval::ALL)),
        (_, GeodesicDomain::Ray) => (Some(Clause::II), Some(RealInterval { lo: f64::NEG_INFINITY, hi: s })),
        (CurvatureBranch::Flat, GeodesicDomain::Line) => (Some(Clause::II1), Some(RealInterval { lo: 0.0, hi: 0.0 })),
        (CurvatureBranch::Hyperbolic, GeodesicDomain::Line) => (Some(Clause::II2), Some(RealInterval { lo: -s, hi: s })),
    };
    let offending: Vec<Eigenvalue> = match clause {
        None => Vec::new(),
        Some(_) => linalg::spectrum(c0.matrix())?
            .into_iter()
            .filter(|z| linalg::is_real_eigenvalue(*z))
            .filter(|z| !interval.is_some_and(|iv| iv.contains(z.re, INTERVAL_SLACK)))
            .map(Eigenvalue::from)
            .collect(),
    };
    let violated = if offending.is_empty() { None } else { clause };
    Ok(SpectrumVerdict {
        consistent: violated.is_none(),
        applied_clause: clause,
        violated_clause: violated,
        offending_eigenvalues: offending,
        admissible_interval: interval,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Behavior {
    DecaysToZero,
    ParallelConstant,
    BlowsUp,
    IdenticallyZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaLimit {
    Zero,
    Nonzero,
    Divergent,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// Eigenvectors of `C0` for the critical eigenvalue `√-c`.
    CriticalEigenspace,
    /// Part of the critical eigenspace annihilated by every `A_ξ(0)`.
    CriticalKernel,
    /// Generalized critical eigenvectors that are not eigenvectors.
    CriticalGeneralized,
    /// Sum of the generalized eigenspaces of all other eigenvalues.
    Complement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDescriptor {
    pub kind: BlockKind,
    pub dimension: usize,
    /// Columns spanning the block (orthonormal).
    #[serde(with = "matrix_serde::row_major")]
    pub basis: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block: BlockDescriptor,
    pub behavior: Behavior,
    /// Exponential rate per unit length (0 for algebraic or constant behavior).
    pub rate: f64,
    /// `(t, max_ξ ‖A_ξ(t) B‖)` with `B` the block basis, including `t = 0`.
    pub samples: Vec<(f64, f64)>,
    /// Whether the sampled norms follow the predicted behavior.
    pub confirmed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `√-c`, the eigenvalue that separates decay from blow-up.
    pub critical_eigenvalue: f64,
    pub per_block: Vec<BlockReport>,
    pub global_alpha_limit: AlphaLimit,
}

fn block_norm(shape: &ShapeOperatorSet, basis: &Matrix) -> f64 {
    shape
        .ops()
        .iter()
        .map(|a| linalg::spectral_norm(&(a * basis)))
        .fold(0.0, f64::max)
}

fn sample_block(
    a0: &ShapeOperatorSet,
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    basis: &Matrix,
) -> Result<Vec<(f64, f64)>> {
    let mut out = vec![(0.0, block_norm(a0, basis))];
    for t in DECAY_SAMPLE_TIMES {
        let shape = shape_operator_at(a0, c, c0, t)?;
        out.push((t, block_norm(&shape, basis)));
    }
    Ok(out)
}

fn zero_floor(a0: &ShapeOperatorSet) -> f64 {
    1e-12 * (1.0 + a0.max_abs())
}

fn behaves_as(behavior: Behavior, samples: &[(f64, f64)], floor: f64) -> bool {
    let n: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let tail = &n[1..];
    match behavior {
        Behavior::IdenticallyZero => n.iter().all(|&x| x <= floor),
        Behavior::ParallelConstant => tail.iter().all(|&x| (x - n[0]).abs() <= 1e-8 * (1.0 + n[0])),
        Behavior::DecaysToZero => {
            n.iter().all(|&x| x <= floor) || tail.windows(2).all(|w| w[1] < w[0]) && tail[0] < n[0].max(floor)
        }
        Behavior::BlowsUp => tail.windows(2).all(|w| w[1] > w[0]) && tail[0] > n[0],
    }
}

/// Reads a behavior off sampled norms, for blocks without a closed-form label.
fn infer_behavior(samples: &[(f64, f64)], floor: f64) -> Behavior {
    [Behavior::IdenticallyZero, Behavior::ParallelConstant, Behavior::BlowsUp, Behavior::DecaysToZero]
        .into_iter()
        .find(|b| behaves_as(*b, samples, floor))
        .unwrap_or_else(|| {
            let last = samples.last().map_or(0.0, |s| s.1);
            if last > samples[0].1 {
                Behavior::BlowsUp
            } else {
                Behavior::DecaysToZero
            }
        })
}

fn annihilated(a0: &ShapeOperatorSet, basis: &Matrix) -> bool {
    block_norm(a0, basis) <= zero_floor(a0)
}

/// Columns of `within` orthogonal to `sub` (both orthonormal).
fn relative_complement(within: &Matrix, sub: &Matrix) -> Matrix {
    let residual = within - sub * (sub.transpose() * within);
    let target = within.ncols().saturating_sub(sub.ncols());
    linalg::leading_left_singular_vectors(&residual, target)
}

/// Forward asymptotics of `A_ξ(t)X` on the blocks of `C0` determined by the
/// critical eigenvalue `√-c`.
pub fn decay_report(
    a0: &ShapeOperatorSet,
    c: SpaceFormCurvature,
    c0: &SplittingTensor,
    domain: GeodesicDomain,
) -> Result<DecayReport> {
    check_shape_dims(a0, c0)?;
    if !domain.is_complete_forward() {
        return Err(NullityError::PreconditionViolated("decay report needs a ray or a line".into()));
    }
    if c.branch() == CurvatureBranch::Spherical {
        return Err(NullityError::PreconditionViolated("decay report needs c <= 0".into()));
    }
    let verdict = classify_splitting_spectrum(c, c0, domain)?;
    if !verdict.consistent {
        return Err(NullityError::InconsistentSpectrum(format!(
            "violates {}",
            verdict.violated_clause.expect("inconsistent verdict names a clause")
        )));
    }

    let q = c0.dim();
    let s = c.sqrt_abs();
    let flat = c.branch() == CurvatureBranch::Flat;
    let shifted = c0.matrix() - Matrix::identity(q, q) * s;

    // Eigenvalues clustering at √-c; Jordan blocks split roots by ~eps^(1/k).
    let algebraic = linalg::spectrum(c0.matrix())?
        .into_iter()
        .filter(|z| (z - Complex64::new(s, 0.0)).norm() <= 1e-5 * (1.0 + s))
        .count();
    let power = linalg::matrix_power(&shifted, algebraic);
    let generalized = linalg::smallest_right_singular_vectors_n(&power, algebraic);
    let eig_tol = 1e-9 * (1.0 + linalg::spectral_norm(c0.matrix()));
    let mut eigenspace = linalg::kernel_basis_below(&shifted, eig_tol);
    if eigenspace.ncols() > algebraic {
        eigenspace = linalg::leading_left_singular_vectors(&eigenspace, algebraic);
    }
    let complement = linalg::leading_left_singular_vectors(&power, q - algebraic);

    let floor = zero_floor(a0);
    let mut blocks = Vec::new();
    let mut push = |kind: BlockKind, basis: Matrix, label: Option<(Behavior, f64)>| -> Result<()> {
        if basis.ncols() == 0 {
            return Ok(());
        }
        let samples = sample_block(a0, c, c0, &basis)?;
        let (behavior, rate, confirmed) = match label {
            Some((b, r)) => (b, r, behaves_as(b, &samples, floor)),
            None => (infer_behavior(&samples, floor), 0.0, true),
        };
        blocks.push(BlockReport {
            block: BlockDescriptor { kind, dimension: basis.ncols(), basis },
            behavior,
            rate,
            samples,
            confirmed,
        });
        Ok(())
    };

    if flat {
        push(BlockKind::CriticalEigenspace, eigenspace.clone(), Some((Behavior::ParallelConstant, 0.0)))?;
    } else {
        // Split off the vectors every A_ξ(0) kills: those stay zero.
        let mut stacked = Matrix::zeros(q * a0.len(), eigenspace.ncols());
        for (i, a) in a0.ops().iter().enumerate() {
            stacked.view_mut((i * q, 0), (q, eigenspace.ncols())).copy_from(&(a * &eigenspace));
        }
        let killed = if eigenspace.ncols() == 0 {
            Matrix::zeros(q, 0)
        } else if a0.is_empty() || linalg::max_abs(&stacked) <= floor {
            eigenspace.clone()
        } else {
            &eigenspace * linalg::kernel_basis_below(&stacked, floor)
        };
        let live = relative_complement(&eigenspace, &killed);
        push(BlockKind::CriticalEigenspace, live, Some((Behavior::BlowsUp, s)))?;
        push(BlockKind::CriticalKernel, killed, Some((Behavior::IdenticallyZero, 0.0)))?;
    }
    push(BlockKind::CriticalGeneralized, relative_complement(&generalized, &eigenspace), None)?;
    let complement_label = if annihilated(a0, &complement) {
        (Behavior::IdenticallyZero, 0.0)
    } else {
        (Behavior::DecaysToZero, if flat { 0.0 } else { s })
    };
    push(BlockKind::Complement, complement, Some(complement_label))?;

    let global_alpha_limit = summarize(blocks.iter().map(|b| b.behavior));
    Ok(DecayReport { critical_eigenvalue: s, per_block: blocks, global_alpha_limit })
}

fn summarize(behaviors: impl Iterator<Item = Behavior>) -> AlphaLimit {
    let live: Vec<Behavior> = behaviors.filter(|b| *b != Behavior::IdenticallyZero).collect();
    let all = |b: Behavior| live.iter().all(|x| *x == b);
    if all(Behavior::DecaysToZero) {
        AlphaLimit::Zero
    } else if all(Behavior::ParallelConstant) {
        AlphaLimit::Nonzero
    } else if all(Behavior::BlowsUp) {
        AlphaLimit::Divergent
    } else {
        AlphaLimit::Mixed
    }
}

/// For `c > 0` and a splitting tensor without real eigenvalues, whether every
/// `A_ξ` has as many positive as negative eigenvalues.
pub fn sign_balance_check(a0: &ShapeOperatorSet, c: SpaceFormCurvature, c0: &SplittingTensor) -> Result<bool> {
    check_shape_dims(a0, c0)?;
    if c.branch() != CurvatureBranch::Spherical {
        return Err(NullityError::PreconditionViolated("sign balance needs c > 0".into()));
    }
    let real = linalg::real_eigenvalues(c0.matrix())?;
    if !real.is_empty() {
        return Err(NullityError::PreconditionViolated(format!(
            "splitting tensor has real eigenvalues {real:?}"
        )));
    }
    if !is_codazzi_compatible(a0, c0) {
        return Err(NullityError::PreconditionViolated("shape operators are not Codazzi compatible".into()));
    }
    Ok(a0.ops().iter().all(|a| {
        let (pos, neg) = linalg::sign_counts(a);
        pos == neg
    }))
}
