//! Small dense linear-algebra helpers shared by the evolution, classification
//! and theorem modules. Everything works on `DMatrix<f64>`.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{NullityError, Result};

pub type Matrix = DMatrix<f64>;

/// Relative asymmetry tolerance for shape operators and compatibility checks.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// An eigenvalue counts as real when `|Im λ| <= REAL_EIGEN_TOL * (1 + |λ|)`.
pub const REAL_EIGEN_TOL: f64 = 1e-10;

/// Singular values below `RANK_TOL * σ_max` are treated as zero.
pub const RANK_TOL: f64 = 1e-8;

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// `max|M - Mᵀ| / (1 + max|M|)`.
pub fn relative_asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst / (1.0 + max_abs(m))
}

pub fn is_symmetric(m: &Matrix) -> bool {
    m.is_square() && relative_asymmetry(m) <= SYMMETRY_TOL
}

pub fn symmetric_part(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

pub fn skew_part(m: &Matrix) -> Matrix {
    (m - m.transpose()) * 0.5
}

/// Eigenvalues of a general real square matrix via the real Schur form.
pub fn spectrum(m: &Matrix) -> Result<Vec<Complex64>> {
    assert!(m.is_square(), "spectrum of a non-square matrix");
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100_000).ok_or(NullityError::EigenSolver)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn is_real_eigenvalue(z: Complex64) -> bool {
    z.im.abs() <= REAL_EIGEN_TOL * (1.0 + z.norm())
}

/// Real eigenvalues (with multiplicity), sorted ascending.
pub fn real_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = spectrum(m)?
        .into_iter()
        .filter(|z| is_real_eigenvalue(*z))
        .map(|z| z.re)
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Eigenvalues of the symmetric part, ascending.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = symmetric_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `R` for attempt `k`: a product of plane rotations through every
/// neighbouring coordinate pair, dense and well away from the identity.
fn retry_rotation(n: usize, k: usize) -> Matrix {
    let angle = 0.7 + 0.45 * k as f64;
    let (c, s) = (angle.cos(), angle.sin());
    let mut r = Matrix::identity(n, n);
    for i in 0..n.saturating_sub(1) {
        let mut g = Matrix::identity(n, n);
        g[(i, i)] = c;
        g[(i + 1, i + 1)] = c;
        g[(i, i + 1)] = -s;
        g[(i + 1, i)] = s;
        r = g * r;
    }
    r
}

fn svd_error(m: &Matrix, u: &Matrix, sv: &DVector<f64>, v_t: &Matrix) -> f64 {
    let k = sv.len();
    let rebuilt = u * Matrix::from_diagonal(sv) * v_t;
    let orth_u = (u.transpose() * u - Matrix::identity(k, k)).amax();
    let orth_v = (v_t * v_t.transpose() - Matrix::identity(k, k)).amax();
    ((rebuilt - m).amax() / m.amax().max(f64::MIN_POSITIVE)).max(orth_u).max(orth_v)
}

type Svd = (Matrix, DVector<f64>, Matrix);

/// Thin SVD `(U, σ, Vᵀ)` whose factors are checked to reproduce `m`.
///
/// nalgebra's bidiagonal SVD occasionally returns orthogonal factors that do
/// not reconstruct the input (observed on exactly rank-one Gram matrices).
/// On failure the SVD of `m R` for a fixed rotation `R` is taken instead and
/// `Vᵀ` mapped back as `V'ᵀ Rᵀ`.
fn checked_svd(m: &Matrix) -> Svd {
    let tol = 1e3 * f64::EPSILON * (m.nrows() + m.ncols()) as f64;
    let mut best: Option<(f64, Svd)> = None;
    for k in 0..4 {
        let (input, rotation) = if k == 0 {
            (m.clone(), None)
        } else {
            let r = retry_rotation(m.ncols(), k);
            (m * &r, Some(r))
        };
        let svd = input.svd(true, true);
        let (u, sv) = (svd.u.expect("requested"), svd.singular_values);
        let v_t = match rotation {
            Some(r) => svd.v_t.expect("requested") * r.transpose(),
            None => svd.v_t.expect("requested"),
        };
        let err = svd_error(m, &u, &sv, &v_t);
        if err <= tol {
            return (u, sv, v_t);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, (u, sv, v_t)));
        }
    }
    best.expect("at least one attempt").1
}

/// Singular values, descending.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = checked_svd(m).1.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn numerical_rank(m: &Matrix) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Counts of positive and negative eigenvalues of a symmetric matrix; values
/// within `RANK_TOL * max|λ|` of zero are not counted.
pub fn sign_counts(m: &Matrix) -> (usize, usize) {
    let ev = symmetric_eigenvalues(m);
    let scale = ev.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return (0, 0);
    }
    let cut = RANK_TOL * scale;
    let pos = ev.iter().filter(|&&x| x > cut).count();
    let neg = ev.iter().filter(|&&x| x < -cut).count();
    (pos, neg)
}

/// Orthonormal basis (as columns) of the numerical kernel of `m`, using the
/// singular value threshold `rel_tol * σ_max`. A zero matrix has the whole
/// domain as kernel. Columns are ordered from the smallest singular value up.
pub fn kernel_basis(m: &Matrix, rel_tol: f64) -> Matrix {
    let top = singular_values(m).first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Matrix::identity(m.ncols(), m.ncols());
    }
    kernel_basis_below(m, rel_tol * top)
}

/// Right singular vectors of `m` whose singular value is at most `threshold`,
/// ascending by singular value.
pub fn kernel_basis_below(m: &Matrix, threshold: f64) -> Matrix {
    smallest_right_singular_vectors(m, |sv| sv.iter().filter(|&&s| s <= threshold).count())
}

/// The `count` right singular vectors with the smallest singular values.
pub fn smallest_right_singular_vectors_n(m: &Matrix, count: usize) -> Matrix {
    smallest_right_singular_vectors(m, |sv| count.min(sv.len()))
}

fn smallest_right_singular_vectors(m: &Matrix, how_many: impl Fn(&[f64]) -> usize) -> Matrix {
    let cols = m.ncols();
    if cols == 0 {
        return Matrix::zeros(0, 0);
    }
    // Pad with zero rows so the SVD returns a full right factor.
    let rows = m.nrows().max(cols);
    let mut padded = Matrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let (_, singular_values, v_t) = checked_svd(&padded);
    let mut picked: Vec<(f64, usize)> = singular_values.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    picked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let ascending: Vec<f64> = picked.iter().map(|p| p.0).collect();
    picked.truncate(how_many(&ascending));
    let mut basis = Matrix::zeros(cols, picked.len());
    for (j, &(_, i)) in picked.iter().enumerate() {
        basis.set_column(j, &v_t.row(i).transpose());
    }
    basis
}

/// Orthonormal basis of the column span of `m` (rank decided by `RANK_TOL`).
pub fn column_space(m: &Matrix) -> Matrix {
    let rank = numerical_rank(m);
    leading_left_singular_vectors(m, rank)
}

/// The `count` left singular vectors with the largest singular values.
pub fn leading_left_singular_vectors(m: &Matrix, count: usize) -> Matrix {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 || count == 0 {
        return Matrix::zeros(rows, 0);
    }
    // Pad with zero columns so the SVD returns a full left factor.
    let cols = m.ncols().max(rows);
    let mut padded = Matrix::zeros(rows, cols);
    padded.view_mut((0, 0), (rows, m.ncols())).copy_from(m);
    let (u, singular_values, _) = checked_svd(&padded);
    let mut picked: Vec<(f64, usize)> = singular_values.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    picked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    picked.truncate(count.min(rows));
    let mut basis = Matrix::zeros(rows, picked.len());
    for (j, &(_, i)) in picked.iter().enumerate() {
        basis.set_column(j, &u.column(i));
    }
    basis
}

/// Gram–Schmidt on the columns; fails on (numerically) dependent input.
pub fn orthonormalize(m: &Matrix) -> Option<Matrix> {
    let mut out = m.clone();
    for j in 0..m.ncols() {
        let mut v: DVector<f64> = out.column(j).into_owned();
        let scale = v.norm();
        for _pass in 0..2 {
            for i in 0..j {
                let qi = out.column(i).into_owned();
                let proj = qi.dot(&v);
                v -= qi * proj;
            }
        }
        let norm = v.norm();
        if scale == 0.0 || norm <= 1e-12 * scale {
            return None;
        }
        out.set_column(j, &(v / norm));
    }
    Some(out)
}

pub fn matrix_power(m: &Matrix, k: usize) -> Matrix {
    let mut out = Matrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

pub fn from_rows(rows: &[Vec<f64>]) -> Option<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
