//! Seeded generators for random test configurations. Every generator takes
//! the RNG explicitly so trials can be reproduced from `(seed, stream)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, Matrix};
use crate::tensor::{ShapeOperatorSet, SplittingTensor};
use crate::theorems::SplittingFamily;

/// Deterministic RNG for trial `stream` under a master `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Entries uniform in `[-scale, scale]`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-scale..=scale))
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> Matrix {
    linalg::symmetric_part(&random_matrix(rng, n, n, scale))
}

pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n, 1.0);
        if let Some(q) = linalg::orthonormalize(&m) {
            return q;
        }
    }
}

/// Symmetric with every eigenvalue of modulus in `[0.5, 2]`.
fn well_conditioned_symmetric(rng: &mut impl Rng, n: usize) -> Matrix {
    let q = random_orthogonal(rng, n);
    let d = nalgebra::DVector::from_fn(n, |_, _| {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        sign * rng.random_range(0.5..=2.0)
    });
    linalg::symmetric_part(&(&q * Matrix::from_diagonal(&d) * q.transpose()))
}

/// Symmetric of the given rank.
fn symmetric_of_rank(rng: &mut impl Rng, n: usize, rank: usize) -> Matrix {
    let q = random_orthogonal(rng, n);
    let d = nalgebra::DVector::from_fn(n, |i, _| if i < rank { rng.random_range(-1.5..=1.5) } else { 0.0 });
    linalg::symmetric_part(&(&q * Matrix::from_diagonal(&d) * q.transpose()))
}

fn normalized(c0: Matrix) -> Matrix {
    let m = linalg::max_abs(&c0);
    if m > 0.0 {
        c0 / m
    } else {
        c0
    }
}

fn polynomial_shape(rng: &mut impl Rng, s0: &Matrix, c0: &Matrix, lowest: usize) -> Matrix {
    let q = c0.nrows();
    let mut power = linalg::matrix_power(c0, lowest);
    let mut out = Matrix::zeros(q, q);
    for _ in lowest..q.max(lowest + 1) {
        out += &power * rng.random_range(-1.0..=1.0);
        power = &power * c0;
    }
    linalg::symmetric_part(&(s0 * out))
}

/// Codazzi-compatible data `(C0, A0)` with `q×q` blocks and `p` normals:
/// `C0 = S0⁻¹ S1` for symmetric `S0, S1` and `A_ξ = S0 · poly_ξ(C0)`, so that
/// every `A_ξ C0^k = S0 poly_ξ(C0) C0^k` is symmetric. `C0` is rescaled to
/// unit max entry, which preserves compatibility.
pub fn compatible_pair(rng: &mut impl Rng, q: usize, p: usize) -> (SplittingTensor, ShapeOperatorSet) {
    let s0 = well_conditioned_symmetric(rng, q);
    let s1 = random_symmetric(rng, q, 1.0);
    build_compatible(rng, s0, s1, p, 0)
}

/// As [`compatible_pair`], with `A_ξ` built from powers `C0^j, j >= 1`, and
/// `S1` of rank `rank`, so every `A_ξ` has rank at most `rank`.
pub fn rank_deficient_compatible_pair(
    rng: &mut impl Rng,
    q: usize,
    p: usize,
    rank: usize,
) -> (SplittingTensor, ShapeOperatorSet) {
    let s0 = well_conditioned_symmetric(rng, q);
    let s1 = symmetric_of_rank(rng, q, rank.min(q));
    build_compatible(rng, s0, s1, p, 1)
}

fn build_compatible(
    rng: &mut impl Rng,
    s0: Matrix,
    s1: Matrix,
    p: usize,
    lowest: usize,
) -> (SplittingTensor, ShapeOperatorSet) {
    let inv = s0.clone().try_inverse().expect("well-conditioned by construction");
    let raw = &inv * &s1;
    let ops = (0..p).map(|_| polynomial_shape(rng, &s0, &raw, lowest)).collect();
    let c0 = normalized(raw);
    (SplittingTensor::new(c0).expect("square"), ShapeOperatorSet::new_unchecked(ops))
}

/// `q = 2` traceless `A0 = [[a, b], [b, -a]]` with `C0 = A0⁻¹ S1` free of real
/// eigenvalues; data on which a spherical nullity geodesic closes up.
pub fn traceless_sphere_pair(rng: &mut impl Rng) -> (SplittingTensor, ShapeOperatorSet) {
    loop {
        let (a, b) = (rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0));
        if a * a + b * b < 0.25 {
            continue;
        }
        let a0 = Matrix::from_row_slice(2, 2, &[a, b, b, -a]);
        let s1 = random_symmetric(rng, 2, 1.0);
        let c0 = a0.clone().try_inverse().expect("det = -(a²+b²) != 0") * s1;
        let disc = (c0[(0, 0)] - c0[(1, 1)]).powi(2) + 4.0 * c0[(0, 1)] * c0[(1, 0)];
        if disc < -1e-3 {
            let c0 = SplittingTensor::new(c0).expect("square");
            return (c0, ShapeOperatorSet::new(2, vec![a0]).expect("symmetric"));
        }
    }
}

/// `C0 = S + λI` with `S` skew and compatible `A0`: in a random orthonormal
/// frame `S` is block diagonal with `σ_i [[0, 1], [-1, 0]]` blocks and each
/// `A_ξ` has traceless symmetric 2×2 blocks (a scalar for odd `q`), which
/// anticommute with the rotation blocks.
pub fn skew_shifted_pair(
    rng: &mut impl Rng,
    q: usize,
    p: usize,
    lambda: f64,
) -> (SplittingTensor, ShapeOperatorSet) {
    let frame = random_orthogonal(rng, q);
    let mut s = Matrix::zeros(q, q);
    let mut ops = vec![Matrix::zeros(q, q); p];
    for block in 0..q / 2 {
        let i = 2 * block;
        let sigma = rng.random_range(0.2..=2.0);
        s[(i, i + 1)] = sigma;
        s[(i + 1, i)] = -sigma;
        for op in ops.iter_mut() {
            let (a, b) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            op[(i, i)] = a;
            op[(i + 1, i + 1)] = -a;
            op[(i, i + 1)] = b;
            op[(i + 1, i)] = b;
        }
    }
    if q % 2 == 1 {
        for op in ops.iter_mut() {
            op[(q - 1, q - 1)] = rng.random_range(-1.0..=1.0);
        }
    }
    let c0 = &frame * s * frame.transpose() + Matrix::identity(q, q) * lambda;
    let ops = ops
        .into_iter()
        .map(|a| linalg::symmetric_part(&(&frame * a * frame.transpose())))
        .collect();
    (SplittingTensor::new(c0).expect("square"), ShapeOperatorSet::new(q, ops).expect("symmetric"))
}

/// `nu` splitting tensors with independent uniform entries.
pub fn random_family(rng: &mut impl Rng, q: usize, nu: usize) -> SplittingFamily {
    let basis = (0..nu)
        .map(|_| SplittingTensor::new(random_matrix(rng, q, q, 1.0)).expect("square"))
        .collect();
    SplittingFamily::new(q, basis).expect("uniform dimensions")
}
