//! Acceptance criteria 1-14. Every criterion prints one `[PASS]` or `[FAIL]`
//! line; the process exits with status 1 if any of them fails.
//!
//! Reference values come from oracles written here, independently of the
//! library: a fixed-step RK4 for the Riccati and shape equations, a cos/sin
//! Jacobi tensor scanned for determinant zeros, a recursive Radon–Hurwitz
//! count and the Gauss equation summed over coordinate planes.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::DVector;
use nullity_core::catalog;
use nullity_core::linalg::Matrix;
use nullity_core::sampling;
use nullity_core::theorems::{
    cylinder_split, find_special_nullity_direction, nu_n, radon_hurwitz, scalar_curvature, theorem1_pipeline,
    CylinderSample, SplittingFamily,
};
use nullity_core::{
    jacobi_tensor, max_invertible_time, shape_operator_at, sign_balance_check, splitting_tensor_at, AlphaLimit,
    NullityError, ShapeOperatorSet, SpaceFormCurvature, SplittingTensor,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

const SEED: u64 = 0x5eed;
const STEP: f64 = 1e-3;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn curvature(c: f64) -> SpaceFormCurvature {
    SpaceFormCurvature::new(c).unwrap()
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
    max_abs(&(a - b))
}

fn frobenius(ops: &[Matrix]) -> f64 {
    ops.iter().map(|a| a.norm_squared()).sum::<f64>().sqrt()
}

fn random_c0(rng: &mut impl Rng, q: usize) -> Matrix {
    Matrix::from_fn(q, q, |_, _| rng.random_range(-1.0..=1.0))
}

fn horizon(c: f64, c0: &Matrix) -> f64 {
    let b = max_invertible_time(curvature(c), &SplittingTensor::new(c0.clone()).unwrap()).unwrap();
    (0.8 * b).min(5.0)
}

/// `J(t) = cos(st) I - sin(st)/s C0` and its flat and hyperbolic analogues.
fn oracle_jacobi(c: f64, c0: &Matrix, t: f64) -> Matrix {
    let q = c0.nrows();
    let (a, b) = if c > 0.0 {
        let s = c.sqrt();
        ((s * t).cos(), (s * t).sin() / s)
    } else if c < 0.0 {
        let s = (-c).sqrt();
        ((s * t).cosh(), (s * t).sinh() / s)
    } else {
        (1.0, t)
    };
    Matrix::identity(q, q) * a - c0 * b
}

/// Fixed-step RK4 for `C' = C² + cI`, `A' = A C` with state `[C, A_1, ..]`.
/// Returns the state every `record` steps, always including `t_end`.
fn oracle_flow(c: f64, c0: &Matrix, a0: &[Matrix], t_end: f64, record: usize) -> Vec<(f64, Vec<Matrix>)> {
    let q = c0.nrows();
    let rhs = |y: &[Matrix]| -> Vec<Matrix> {
        let cm = &y[0];
        let mut d = vec![cm * cm + Matrix::identity(q, q) * c];
        d.extend(y[1..].iter().map(|a| a * cm));
        d
    };
    let shift = |y: &[Matrix], k: &[Matrix], h: f64| -> Vec<Matrix> {
        y.iter().zip(k).map(|(a, b)| a + b * h).collect()
    };
    let steps = ((t_end / STEP).ceil() as usize).max(1);
    let h = t_end / steps as f64;
    let mut y: Vec<Matrix> = std::iter::once(c0.clone()).chain(a0.iter().cloned()).collect();
    let mut out = Vec::new();
    for i in 1..=steps {
        let k1 = rhs(&y);
        let k2 = rhs(&shift(&y, &k1, 0.5 * h));
        let k3 = rhs(&shift(&y, &k2, 0.5 * h));
        let k4 = rhs(&shift(&y, &k3, h));
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += (&k1[j] + &k2[j] * 2.0 + &k3[j] * 2.0 + &k4[j]) * (h / 6.0);
        }
        if i % record == 0 || i == steps {
            out.push((i as f64 * h, y.clone()));
        }
    }
    out
}

/// Scans `det J` on a uniform grid for the first zero: a sign change is
/// bisected, a local minimum of `|det J|` is refined by golden section and
/// kept if it reaches zero.
fn oracle_singular_time(c: f64, c0: &Matrix, horizon: f64, samples: usize) -> f64 {
    let det = |t: f64| oracle_jacobi(c, c0, t).determinant();
    let bisect = |mut lo: f64, mut hi: f64| {
        let positive = det(lo) > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (det(mid) > 0.0) == positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let golden = |mut lo: f64, mut hi: f64| {
        let r = 0.5 * (5.0_f64.sqrt() - 1.0);
        while hi - lo > 1e-13 {
            let (x1, x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
            if det(x1).abs() < det(x2).abs() {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        0.5 * (lo + hi)
    };
    let h = horizon / samples as f64;
    let scale = |t: f64| oracle_jacobi(c, c0, t).norm().max(1.0).powi(c0.nrows() as i32);
    let mut prev = (0.0, det(0.0));
    let mut before = prev;
    for k in 1..=samples {
        let t = k as f64 * h;
        let d = det(t);
        if d == 0.0 {
            return t;
        }
        if (d > 0.0) != (prev.1 > 0.0) {
            return bisect(prev.0, t);
        }
        if k >= 2 && prev.1.abs() <= before.1.abs() && prev.1.abs() <= d.abs() {
            let m = golden(before.0, t);
            if (det(m) > 0.0) != (before.1 > 0.0) {
                return bisect(before.0, m);
            }
            if det(m).abs() <= 1e-12 * scale(m) {
                return m;
            }
        }
        before = prev;
        prev = (t, d);
    }
    f64::INFINITY
}

/// Radon–Hurwitz number by peeling factors of 16.
fn oracle_radon_hurwitz(m: u64) -> u64 {
    if m % 2 == 1 {
        1
    } else if m % 16 == 0 {
        8 + oracle_radon_hurwitz(m / 16)
    } else if m % 8 == 0 {
        8
    } else if m % 4 == 0 {
        4
    } else {
        2
    }
}

/// Normalized scalar curvature from sectional curvatures of coordinate
/// planes: `K_ij = c + Σ_ξ (a_ii a_jj - a_ij²)`.
fn oracle_scalar_curvature(ops: &[Matrix], c: f64) -> f64 {
    let n = ops[0].nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += c + ops.iter().map(|a| a[(i, i)] * a[(j, j)] - a[(i, j)].powi(2)).sum::<f64>();
            }
        }
    }
    total / (n * (n - 1)) as f64
}

fn sym2_eigenvalues(a: &Matrix) -> [f64; 2] {
    let (p, d, b) = (a[(0, 0)], a[(1, 1)], 0.5 * (a[(0, 1)] + a[(1, 0)]));
    let r = (0.25 * (p - d).powi(2) + b * b).sqrt();
    [0.5 * (p + d) - r, 0.5 * (p + d) + r]
}

fn riccati_equivalence() -> Outcome {
    let mut rng = sampling::rng(SEED, 1);
    let mut worst = 0.0_f64;
    for case in 0..200 {
        let c = [-1.0, 0.0, 1.0][case % 3];
        let q = rng.random_range(1..=5);
        let c0 = random_c0(&mut rng, q);
        let st = SplittingTensor::new(c0.clone()).unwrap();
        for (t, y) in oracle_flow(c, &c0, &[], horizon(c, &c0), 100) {
            let exact = splitting_tensor_at(curvature(c), &st, t).map_err(|e| format!("case {case}: {e}"))?;
            let err = max_diff(exact.matrix(), &y[0]);
            worst = worst.max(err);
            ensure(err <= 1e-6, || format!("case {case} (c = {c}, q = {q}) t = {t}: error {err:e}"))?;
        }
    }
    Ok(format!("200 cases, max error {worst:.2e} <= 1e-6"))
}

fn shape_equivalence() -> Outcome {
    let mut rng = sampling::rng(SEED, 2);
    let mut worst = 0.0_f64;
    for case in 0..200 {
        let c = [-1.0, 0.0, 1.0][case % 3];
        let (q, p) = (rng.random_range(1..=5), rng.random_range(1..=3));
        let (st, a0) = sampling::compatible_pair(&mut rng, q, p);
        let c0 = st.matrix().clone();
        for (t, y) in oracle_flow(c, &c0, a0.ops(), horizon(c, &c0), 100) {
            let exact = shape_operator_at(&a0, curvature(c), &st, t).map_err(|e| format!("case {case}: {e}"))?;
            for (a, b) in exact.ops().iter().zip(&y[1..]) {
                let err = max_diff(a, b);
                worst = worst.max(err);
                ensure(err <= 1e-6, || format!("case {case} (c = {c}, q = {q}) t = {t}: error {err:e}"))?;
            }
        }
    }
    Ok(format!("200 compatible pairs, max error {worst:.2e} <= 1e-6"))
}

fn jacobi_residual() -> Outcome {
    let mut rng = sampling::rng(SEED, 3);
    let h = 1e-3;
    let mut worst = 0.0_f64;
    for case in 0..100 {
        let c = [-1.0, 0.0, 1.0][case % 3];
        let q = rng.random_range(1..=5);
        let st = SplittingTensor::new(random_c0(&mut rng, q)).unwrap();
        let t = rng.random_range(h..=5.0);
        let j = |s: f64| jacobi_tensor(curvature(c), &st, s).mat;
        let second = (j(t + h) - j(t) * 2.0 + j(t - h)) / (h * h);
        let ratio = max_abs(&(second + j(t) * c)) / (1.0 + max_abs(&j(t)));
        worst = worst.max(ratio);
        ensure(ratio <= 1e-4, || format!("case {case} (c = {c}, t = {t}): relative residual {ratio:e}"))?;
    }
    Ok(format!("100 cases, max |J'' + cJ| / (1 + |J|) = {worst:.2e} <= 1e-4"))
}

fn relative_asymmetry(a: &Matrix) -> f64 {
    let scale = max_abs(a);
    if scale == 0.0 {
        0.0
    } else {
        max_abs(&(a - a.transpose())) / scale
    }
}

fn symmetry_propagation() -> Outcome {
    let mut rng = sampling::rng(SEED, 4);
    let mut worst = 0.0_f64;
    for case in 0..100 {
        let c = [-1.0, 0.0, 1.0][case % 3];
        let (q, p) = (rng.random_range(1..=5), rng.random_range(1..=3));
        let (st, a0) = sampling::compatible_pair(&mut rng, q, p);
        let end = horizon(c, st.matrix());
        for i in 0..=20 {
            let t = end * i as f64 / 20.0;
            let at = shape_operator_at(&a0, curvature(c), &st, t).map_err(|e| e.to_string())?;
            let asym = at.ops().iter().map(relative_asymmetry).fold(0.0, f64::max);
            worst = worst.max(asym);
            ensure(asym <= 1e-8, || format!("case {case} t = {t}: relative asymmetry {asym:e}"))?;
        }
    }
    // A0 = diag(1, 2) with a nilpotent C0: A(t) = [[1, t], [0, 2]].
    let a0 = ShapeOperatorSet::new(2, vec![Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0])]).unwrap();
    let st = SplittingTensor::from_row_slice(2, &[0.0, 1.0, 0.0, 0.0]);
    let control = (1..=10)
        .map(|i| {
            let at = shape_operator_at(&a0, SpaceFormCurvature::EUCLIDEAN, &st, 0.1 * i as f64).unwrap();
            relative_asymmetry(&at.ops()[0])
        })
        .fold(0.0, f64::max);
    ensure(control > 1e-4, || format!("incompatible control stayed symmetric: {control:e}"))?;
    Ok(format!("100 pairs, max asymmetry {worst:.2e} <= 1e-8; incompatible control reaches {control:.2e} > 1e-4"))
}

fn sign_counts(a: &Matrix) -> (usize, usize, usize) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let tol = 1e-9 * eig.iter().fold(1e-300_f64, |m, x| m.max(x.abs()));
    let pos = eig.iter().filter(|&&x| x > tol).count();
    let neg = eig.iter().filter(|&&x| x < -tol).count();
    (pos + neg, pos, neg)
}

fn rank_signature_constancy() -> Outcome {
    let mut rng = sampling::rng(SEED, 5);
    for case in 0..100 {
        let c = [-1.0, 0.0, 1.0][case % 3];
        let q = rng.random_range(2..=5);
        let (p, rank) = (rng.random_range(1..=2), rng.random_range(1..q));
        let (st, a0) = sampling::rank_deficient_compatible_pair(&mut rng, q, p, rank);
        let start: Vec<_> = a0.ops().iter().map(sign_counts).collect();
        let end = horizon(c, st.matrix());
        for i in 1..=20 {
            let t = end * i as f64 / 20.0;
            let at = shape_operator_at(&a0, curvature(c), &st, t).map_err(|e| e.to_string())?;
            let now: Vec<_> = at.ops().iter().map(sign_counts).collect();
            ensure(now == start, || format!("case {case} t = {t}: (rank, pos, neg) {start:?} -> {now:?}"))?;
        }
    }
    Ok("100 rank-deficient pairs, counts equal at 20 times each".into())
}

fn sphere_continuation() -> Outcome {
    let mut rng = sampling::rng(SEED, 6);
    let mut worst = 0.0_f64;
    for case in 0..50 {
        let (st, a0) = sampling::traceless_sphere_pair(&mut rng);
        let at = shape_operator_at(&a0, SpaceFormCurvature::SPHERE, &st, PI).map_err(|e| e.to_string())?;
        let (before, after) = (sym2_eigenvalues(&a0.ops()[0]), sym2_eigenvalues(&at.ops()[0]));
        let err = (after[0] + before[1]).abs().max((after[1] + before[0]).abs());
        worst = worst.max(err);
        ensure(err <= 1e-8, || format!("case {case}: eigenvalues {before:?} -> {after:?}"))?;
        let balanced = sign_balance_check(&a0, SpaceFormCurvature::SPHERE, &st).map_err(|e| e.to_string())?;
        ensure(balanced, || format!("case {case}: sign balance rejected"))?;
    }
    Ok(format!("50 traceless pairs, spec(A(pi)) = -spec(A(0)) within {worst:.2e}; all sign balanced"))
}

fn hyperbolic_decay() -> Outcome {
    let mut rng = sampling::rng(SEED, 7);
    let mut worst = 0.0_f64;
    for case in 0..50 {
        let (q, p) = (rng.random_range(1..=5), rng.random_range(1..=2));
        let lambda = match case {
            0..=4 => 0.0,
            5..=9 => -1.0,
            _ => rng.random_range(-2.0..=0.0),
        };
        let (st, a0) = sampling::skew_shifted_pair(&mut rng, q, p, lambda);
        let at = shape_operator_at(&a0, SpaceFormCurvature::HYPERBOLIC, &st, 20.0).map_err(|e| e.to_string())?;
        let ratio = frobenius(at.ops()) / frobenius(a0.ops());
        worst = worst.max(ratio);
        ensure(ratio <= 1e-6, || format!("case {case} (q = {q}, lambda = {lambda}): |A(20)|/|A0| = {ratio:e}"))?;
    }
    let st = SplittingTensor::from_row_slice(1, &[1.0]);
    let a0 = ShapeOperatorSet::new(1, vec![Matrix::identity(1, 1)]).unwrap();
    let blow = frobenius(shape_operator_at(&a0, SpaceFormCurvature::HYPERBOLIC, &st, 10.0).unwrap().ops());
    ensure(blow >= 1e3, || format!("C0 = I control: |A(10)| = {blow:e}"))?;
    Ok(format!("50 cases, max |A(20)|/|A0| = {worst:.2e} <= 1e-6; C0 = I control |A(10)| = {blow:.3e} >= 1e3"))
}

/// Coordinates `((a - d)/2, (b + c)/2)` of the symmetric-traceless part of a 2×2 matrix.
fn sym_traceless_coords(m: &Matrix) -> [f64; 2] {
    [0.5 * (m[(0, 0)] - m[(1, 1)]), 0.5 * (m[(0, 1)] + m[(1, 0)])]
}

fn special_direction() -> Outcome {
    let st = |d: &[f64]| SplittingTensor::from_row_slice(2, d);
    let members = [st(&[1.0, 0.0, 0.0, -1.0]), st(&[0.0, 1.0, 1.0, 0.0]), st(&[1.0, 1.0, -1.0, 1.0])];
    let rows: Vec<[f64; 2]> = members.iter().map(|m| sym_traceless_coords(m.matrix())).collect();
    // Kernel of the 2×3 coefficient matrix: cross product of its rows.
    let (u, v) = ([rows[0][0], rows[1][0], rows[2][0]], [rows[0][1], rows[1][1], rows[2][1]]);
    let kernel = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let family = SplittingFamily::new(2, members.to_vec()).unwrap();
    let a0 = ShapeOperatorSet::new(2, vec![Matrix::from_row_slice(2, 2, &[0.8, -0.3, -0.3, -0.8])]).unwrap();
    let report = theorem1_pipeline(&family, &a0, SpaceFormCurvature::HYPERBOLIC).map_err(|e| e.to_string())?;
    let d = &report.direction;
    let knorm = kernel.iter().map(|x| x * x).sum::<f64>().sqrt();
    let overlap: f64 = d.coeffs.iter().zip(&kernel).map(|(a, b)| a * b).sum::<f64>() / knorm;
    ensure((overlap.abs() - 1.0).abs() <= 1e-12, || format!("T0 = {:?}, oracle kernel {kernel:?}", d.coeffs))?;
    ensure((d.lambda + 1.0).abs() <= 1e-12, || format!("lambda = {}", d.lambda))?;
    ensure(report.decay.global_alpha_limit == AlphaLimit::Zero, || {
        format!("alpha limit {:?}", report.decay.global_alpha_limit)
    })?;

    let mut rng = sampling::rng(SEED, 8);
    for trial in 0..1000 {
        let q = rng.random_range(1..=4);
        let nu = q * (q + 1) / 2 + rng.random_range(0..=2);
        let family = sampling::random_family(&mut rng, q, nu);
        let dir = find_special_nullity_direction(&family)
            .ok_or_else(|| format!("trial {trial}: no direction for q = {q}, nu0 = {nu}"))?;
        let combo = family
            .basis()
            .iter()
            .zip(&dir.coeffs)
            .fold(Matrix::zeros(q, q), |acc, (m, a)| acc + m.matrix() * *a);
        let unit = dir.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
        let lambda = -combo.trace() / q as f64;
        let sym = (&combo + combo.transpose()) * 0.5 + Matrix::identity(q, q) * lambda;
        ensure((unit - 1.0).abs() <= 1e-10, || format!("trial {trial}: |T0| = {unit}"))?;
        ensure(max_abs(&sym) <= 1e-9, || format!("trial {trial}: symmetric-traceless residue {:e}", max_abs(&sym)))?;
        ensure(lambda <= 1e-12 && (dir.lambda - lambda).abs() <= 1e-9, || {
            format!("trial {trial}: lambda {} vs oracle {lambda}", dir.lambda)
        })?;
    }
    Ok("worked family T0 = e3, lambda = -1, alpha limit Zero; 1000/1000 random families yield a direction".into())
}

fn max_time_vs_det_sampling() -> Outcome {
    let exact = [
        (0.0, Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -3.0]), 0.5),
        (1.0, Matrix::from_row_slice(1, 1, &[1.0]), FRAC_PI_4),
        (-1.0, Matrix::identity(2, 2) * 2.0, 0.5 * 3.0_f64.ln()),
    ];
    for (c, c0, want) in &exact {
        let got = max_invertible_time(curvature(*c), &SplittingTensor::new(c0.clone()).unwrap()).unwrap();
        let oracle = oracle_singular_time(*c, c0, 2.0, 20_000);
        ensure((got - want).abs() <= 1e-6 && (oracle - want).abs() <= 1e-6, || {
            format!("c = {c}: b_max {got}, oracle {oracle}, expected {want}")
        })?;
    }
    let mut rng = sampling::rng(SEED, 9);
    let mut worst = 0.0_f64;
    let mut finite = 0;
    for case in 0..100 {
        let c = [-1.0, 0.0, 1.0][case % 3];
        let q = rng.random_range(1..=5);
        let c0 = random_c0(&mut rng, q);
        let got = max_invertible_time(curvature(c), &SplittingTensor::new(c0.clone()).unwrap()).unwrap();
        let window = if got.is_finite() {
            1.25 * got + 0.1
        } else if c > 0.0 {
            2.0 * PI
        } else {
            30.0
        };
        let oracle = oracle_singular_time(c, &c0, window, 50_000);
        let err = if got.is_finite() || oracle.is_finite() { (got - oracle).abs() } else { 0.0 };
        ensure(err <= 1e-6, || format!("case {case} (c = {c}, q = {q}): b_max {got}, oracle {oracle}"))?;
        worst = worst.max(err);
        finite += usize::from(got.is_finite());
    }
    Ok(format!("3 exact values and 100 random cases ({finite} finite), max disagreement {worst:.2e} <= 1e-6"))
}

fn radon_hurwitz_oracle() -> Outcome {
    for m in 1..=1024 {
        let (got, want) = (radon_hurwitz(m).map_err(|e| e.to_string())?, oracle_radon_hurwitz(m));
        ensure(got == want, || format!("rho({m}) = {got}, oracle {want}"))?;
    }
    let table: Vec<u64> = (1..=16).map(|m| radon_hurwitz(m).unwrap()).collect();
    ensure(table == [1, 2, 1, 4, 1, 2, 1, 8, 1, 2, 1, 4, 1, 2, 1, 9], || format!("table {table:?}"))?;
    let nus: Vec<u64> = [2, 9, 17].iter().map(|&n| nu_n(n).unwrap()).collect();
    ensure(nus == [0, 1, 1], || format!("nu_n(2, 9, 17) = {nus:?}"))?;
    Ok("m = 1..1024 agree, table for 1..16 reproduced, nu_n(2, 9, 17) = (0, 1, 1)".into())
}

fn catalog_identities() -> Outcome {
    for rho in [0.5, 1.0, 2.0] {
        let model = catalog::hyperbolic_cylinder(2, 4, rho).map_err(|e| e.to_string())?;
        let curvatures = &model.principal_curvatures()[0];
        let (lh, ls) = (curvatures[0], curvatures[curvatures.len() - 1]);
        let sphere = -1.0 + ls * ls;
        let hyper = -1.0 + lh * lh;
        ensure((sphere - 1.0 / (rho * rho)).abs() <= 1e-12, || format!("rho = {rho}: sphere factor {sphere}"))?;
        ensure((hyper + 1.0 / (1.0 + rho * rho)).abs() <= 1e-12, || format!("rho = {rho}: hyperbolic factor {hyper}"))?;
        ensure((ls * lh - 1.0).abs() <= 1e-15, || format!("rho = {rho}: product {}", ls * lh))?;
        let failed: Vec<_> = model.verify().into_iter().filter(|c| !c.passed).collect();
        ensure(failed.is_empty(), || format!("rho = {rho}: failed checks {failed:?}"))?;
    }
    let r3 = 3.0_f64.sqrt();
    let distinct = [r3, 0.0, -r3];
    // Σ_{j≠i} (1 + λ_i λ_j)/(λ_i - λ_j), written out for each i.
    let by_hand = [
        1.0 / r3 + (1.0 - 3.0) / (2.0 * r3),
        1.0 / (-r3) + 1.0 / r3,
        (1.0 - 3.0) / (-2.0 * r3) + 1.0 / (-r3),
    ];
    let residuals = catalog::cartan_identity_residuals(&distinct, 1.0);
    for (got, want) in residuals.iter().zip(by_hand) {
        ensure(got.abs() <= 1e-12 && want.abs() <= 1e-12, || format!("Cartan residuals {residuals:?}"))?;
    }
    let veronese = catalog::cartan_veronese_polar().map_err(|e| e.to_string())?;
    let trace = veronese.shape.ops()[0].trace();
    ensure(trace.abs() <= 1e-12, || format!("trace {trace}"))?;
    let failed: Vec<_> = veronese.verify().into_iter().filter(|c| !c.passed).collect();
    ensure(failed.is_empty(), || format!("Veronese polar failed checks {failed:?}"))?;
    Ok("hyperbolic cylinders rho = 0.5, 1, 2 match 1/rho^2 and -1/(1+rho^2); Cartan identity and trace vanish".into())
}

/// Rotation of R³ taking `e3` to a generic axis.
fn frame() -> Matrix {
    let mut rng = sampling::rng(SEED, 12);
    sampling::random_orthogonal(&mut rng, 3)
}

fn cylinder_recovery() -> Outcome {
    let q = frame();
    let axis = q.column(2).into_owned();
    let line = Matrix::from_column_slice(3, 1, axis.as_slice());
    let mut samples = Vec::new();
    for i in 0..16 {
        let theta = 2.0 * PI * i as f64 / 16.0;
        for z in [-2.0, -0.3, 1.1, 3.0] {
            let local = DVector::from_column_slice(&[1.5 * theta.cos(), 1.5 * theta.sin(), z]);
            samples.push(CylinderSample { point: &q * local, nullity_basis: line.clone(), leaf: Some(i) });
        }
    }
    let split = cylinder_split(&samples, 1).map_err(|e| e.to_string())?;
    let got = split.axis.column(0).into_owned();
    let angle = (1.0 - got.dot(&axis).powi(2)).max(0.0).sqrt().asin();
    ensure(angle <= 1e-8, || format!("axis angle {angle:e}"))?;
    ensure(split.residual <= 1e-10, || format!("residual {:e}", split.residual))?;

    let mut cone = Vec::new();
    for i in 0..16 {
        let theta = 2.0 * PI * i as f64 / 16.0;
        let ruling = DVector::from_column_slice(&[theta.cos(), theta.sin(), 1.0]) / 2.0_f64.sqrt();
        for s in [0.5, 1.0, 2.0] {
            let basis = Matrix::from_column_slice(3, 1, ruling.as_slice());
            cone.push(CylinderSample { point: &ruling * s, nullity_basis: basis, leaf: Some(i) });
        }
    }
    match cylinder_split(&cone, 1) {
        Err(NullityError::NotConstant { max_angle }) => Ok(format!(
            "circle x line: axis angle {angle:.1e}, residual {:.1e}; cone rejected (angle {max_angle:.3})",
            split.residual
        )),
        other => Err(format!("cone samples gave {other:?}")),
    }
}

fn scalar_curvature_chain() -> Outcome {
    for c in [-1.0, 0.0, 1.0] {
        for n in 2..=6 {
            for p in 1..=3 {
                let s = scalar_curvature(&ShapeOperatorSet::zeros(n, p), n, curvature(c)).map_err(|e| e.to_string())?;
                ensure(s == c, || format!("A = 0, c = {c}, n = {n}, p = {p}: s = {s}"))?;
            }
        }
    }
    let mut rng = sampling::rng(SEED, 13);
    let (mut below, mut above) = (0, 0);
    let mut worst = 0.0_f64;
    for case in 0..500 {
        let (n, p) = (rng.random_range(2..=5), rng.random_range(1..=3));
        let ops: Vec<Matrix> = (0..p)
            .map(|_| {
                let shift = rng.random_range(-1.5..=1.5);
                sampling::random_symmetric(&mut rng, n, 1.0) + Matrix::identity(n, n) * shift
            })
            .collect();
        let s = scalar_curvature(&ShapeOperatorSet::new(n, ops.clone()).unwrap(), n, SpaceFormCurvature::HYPERBOLIC)
            .map_err(|e| e.to_string())?;
        let oracle = oracle_scalar_curvature(&ops, -1.0);
        worst = worst.max((s - oracle).abs());
        ensure((s - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()), || format!("case {case}: s = {s}, oracle {oracle}"))?;
        let alpha2: f64 = ops.iter().map(|a| a.norm_squared()).sum();
        let h2: f64 = ops.iter().map(|a| (a.trace() / n as f64).powi(2)).sum();
        let gap = alpha2 - (n * n) as f64 * h2;
        if (s + 1.0).abs() <= 1e-12 || gap.abs() <= 1e-10 {
            continue;
        }
        ensure((s < -1.0) == (gap > 0.0), || format!("case {case}: s = {s}, |alpha|^2 - n^2|H|^2 = {gap}"))?;
        if s < -1.0 {
            below += 1;
        } else {
            above += 1;
        }
    }
    ensure(below >= 50 && above >= 50, || format!("one-sided sample: {below} with s <= -1, {above} above"))?;
    Ok(format!(
        "A = 0 gives s = c; 500 sets agree with the Gauss sum (max {worst:.1e}), equivalence holds on {below} + {above}"
    ))
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run_once(sub: &str, scenario: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_nullity"))
        .args([sub, "--scenario", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("{sub} {}: {}", scenario.display(), String::from_utf8_lossy(&status.stderr)))
}

fn cli_determinism() -> Outcome {
    let scenarios = manifest_dir().join("scenarios");
    let golden = manifest_dir().join("tests").join("golden");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut paths: Vec<PathBuf> = fs::read_dir(&scenarios).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    let mut used = Vec::new();
    for path in &paths {
        let stem = path.file_stem().unwrap().to_str().unwrap();
        let sub = ["evolve", "classify", "search", "catalog", "check"]
            .into_iter()
            .find(|m| stem.starts_with(m))
            .ok_or_else(|| format!("cannot tell the mode of {stem}"))?;
        run_once(sub, path, a.path())?;
        run_once(sub, path, b.path())?;
        if !used.contains(&sub) {
            used.push(sub);
        }
    }
    ensure(used.len() == 5, || format!("subcommands covered: {used:?}"))?;
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    ensure(names.len() == paths.len(), || format!("{} outputs for {} scenarios", names.len(), paths.len()))?;
    for name in &names {
        let first = fs::read(a.path().join(name)).unwrap();
        ensure(first == fs::read(b.path().join(name)).unwrap(), || format!("{name:?} differs between runs"))?;
        let want = fs::read(golden.join(name)).map_err(|_| format!("no golden file for {name:?}"))?;
        ensure(first == want, || format!("{name:?} differs from its golden file"))?;
    }
    Ok(format!("{} scenarios over 5 subcommands: identical across two runs and equal to golden files", names.len()))
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("AC-01", "Riccati oracle equivalence", riccati_equivalence),
        ("AC-02", "shape-operator oracle equivalence", shape_equivalence),
        ("AC-03", "Jacobi residual", jacobi_residual),
        ("AC-04", "symmetry propagation", symmetry_propagation),
        ("AC-05", "rank/signature constancy", rank_signature_constancy),
        ("AC-06", "sphere continuation", sphere_continuation),
        ("AC-07", "hyperbolic decay", hyperbolic_decay),
        ("AC-08", "special nullity direction", special_direction),
        ("AC-09", "max_invertible_time vs det sampling", max_time_vs_det_sampling),
        ("AC-10", "Radon-Hurwitz numbers", radon_hurwitz_oracle),
        ("AC-11", "catalog identities", catalog_identities),
        ("AC-12", "cylinder splitting", cylinder_recovery),
        ("AC-13", "scalar curvature chain", scalar_curvature_chain),
        ("AC-14", "CLI determinism and golden files", cli_determinism),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    println!(
        "{} criteria, {} passed, {failed} failed in {:.1}s",
        criteria.len(),
        criteria.len() - failed,
        total.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
