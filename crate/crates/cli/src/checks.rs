//! The invariant suite behind `nullity check`: named properties, each run on
//! `trials` seeded random cases, in a fixed order.

use nullity_core::catalog;
use nullity_core::linalg::{self, Matrix};
use nullity_core::oracle::{riccati_trajectory, shape_ode_trajectory, singular_time_by_det_sampling};
use nullity_core::sampling;
use nullity_core::theorems::{
    alpha_norm, find_special_nullity_direction, mean_curvature_norm, radon_hurwitz, scalar_curvature,
};
use nullity_core::{
    classify_splitting_spectrum, decay_report, is_codazzi_compatible, jacobi_tensor, max_invertible_time,
    shape_operator_at, sign_balance_check, splitting_tensor_at, Behavior, GeodesicDomain, ShapeOperatorSet,
    SpaceFormCurvature, SplittingTensor,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_TRIALS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type Trial = fn(&mut ChaCha8Rng, f64) -> Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn curvature(r: &mut ChaCha8Rng) -> SpaceFormCurvature {
    SpaceFormCurvature::new([-1.0, 0.0, 1.0][r.random_range(0..3)]).expect("finite")
}

fn horizon(c: SpaceFormCurvature, c0: &SplittingTensor) -> Result<f64, String> {
    Ok((0.8 * max_invertible_time(c, c0).map_err(|e| e.to_string())?).min(5.0))
}

fn grid(end: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| end * i as f64 / n as f64).collect()
}

fn uniform_c0(r: &mut ChaCha8Rng) -> SplittingTensor {
    let q = r.random_range(1..=5);
    SplittingTensor::new(sampling::random_matrix(r, q, q, 1.0)).expect("square")
}

fn gauge_identity(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let c = curvature(r);
    let q = r.random_range(1..=5);
    let (c0, a0) = sampling::compatible_pair(r, q, 2);
    let ct = splitting_tensor_at(c, &c0, 0.0).map_err(|e| e.to_string())?;
    let at = shape_operator_at(&a0, c, &c0, 0.0).map_err(|e| e.to_string())?;
    ensure(ct == c0 && at == a0, || "t = 0 does not return the initial data".into())
}

fn riccati_oracle(r: &mut ChaCha8Rng, step: f64) -> Result<(), String> {
    let c = curvature(r);
    let c0 = uniform_c0(r);
    let times = grid(horizon(c, &c0)?, 5);
    let rk4 = riccati_trajectory(c, &c0, &times, step).map_err(|e| e.to_string())?;
    for (t, oracle) in times.iter().zip(&rk4) {
        let exact = splitting_tensor_at(c, &c0, *t).map_err(|e| e.to_string())?;
        let gap = linalg::max_abs_diff(exact.matrix(), oracle.matrix());
        ensure(gap <= 1e-6, || format!("c = {}, t = {t}: deviation {gap:e}", c.value()))?;
    }
    Ok(())
}

fn shape_oracle(r: &mut ChaCha8Rng, step: f64) -> Result<(), String> {
    let c = curvature(r);
    let q = r.random_range(1..=5);
    let (c0, a0) = sampling::compatible_pair(r, q, 2);
    let times = grid(horizon(c, &c0)?, 5);
    let rk4 = shape_ode_trajectory(&a0, c, &c0, &times, step).map_err(|e| e.to_string())?;
    for (t, oracle) in times.iter().zip(&rk4) {
        let exact = shape_operator_at(&a0, c, &c0, *t).map_err(|e| e.to_string())?;
        for (x, y) in exact.ops().iter().zip(oracle.ops()) {
            let gap = linalg::max_abs_diff(x, y);
            ensure(gap <= 1e-6, || format!("c = {}, t = {t}: deviation {gap:e}", c.value()))?;
        }
    }
    Ok(())
}

fn jacobi_residual(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let c = curvature(r);
    let c0 = uniform_c0(r);
    let t = r.random_range(0.05..1.0) * horizon(c, &c0)?.max(0.01);
    let h = 1e-3;
    let j = |s: f64| jacobi_tensor(c, &c0, s).mat;
    let residual = linalg::max_abs(&((j(t + h) - j(t) * 2.0 + j(t - h)) / (h * h) + j(t) * c.value()));
    let bound = 1e-4 * (1.0 + linalg::max_abs(&j(t)));
    ensure(residual <= bound, || format!("t = {t}: residual {residual:e}"))
}

fn symmetry_propagation(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let c = curvature(r);
    let q = r.random_range(1..=5);
    let (c0, a0) = sampling::compatible_pair(r, q, 2);
    for t in grid(horizon(c, &c0)?, 10) {
        let a = shape_operator_at(&a0, c, &c0, t).map_err(|e| e.to_string())?;
        let asym = a.max_asymmetry();
        ensure(asym <= 1e-8, || format!("t = {t}: asymmetry {asym:e}"))?;
    }
    Ok(())
}

fn rank_signature(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let c = curvature(r);
    let q = r.random_range(2..=5);
    let rank = r.random_range(1..q);
    let (c0, a0) = sampling::rank_deficient_compatible_pair(r, q, 2, rank);
    let counts = |a: &ShapeOperatorSet| -> Vec<_> {
        a.ops().iter().map(|x| (linalg::numerical_rank(x), linalg::sign_counts(x))).collect()
    };
    let start = counts(&a0);
    for t in grid(horizon(c, &c0)?, 20) {
        let now = counts(&shape_operator_at(&a0, c, &c0, t).map_err(|e| e.to_string())?);
        ensure(now == start, || format!("t = {t}: {now:?} != {start:?}"))?;
    }
    Ok(())
}

fn kernel_invariance(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let q = r.random_range(2..=5);
    let rank = r.random_range(1..q);
    let (c0, a0) = sampling::rank_deficient_compatible_pair(r, q, 2, rank);
    for a in a0.ops() {
        let kernel = linalg::kernel_basis(a, linalg::RANK_TOL);
        let leak = linalg::max_abs(&(a * (c0.matrix() * &kernel)));
        ensure(leak <= 1e-8 * (1.0 + linalg::max_abs(a)), || format!("leak {leak:e}"))?;
    }
    Ok(())
}

fn cocycle(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let c = curvature(r);
    let c0 = uniform_c0(r);
    let total = horizon(c, &c0)?;
    let s = r.random_range(0.1..0.9) * total;
    let direct = splitting_tensor_at(c, &c0, total).map_err(|e| e.to_string())?;
    let mid = splitting_tensor_at(c, &c0, s).map_err(|e| e.to_string())?;
    let composed = splitting_tensor_at(c, &mid, total - s).map_err(|e| e.to_string())?;
    let gap = linalg::max_abs_diff(direct.matrix(), composed.matrix());
    ensure(gap <= 1e-8 * (1.0 + linalg::max_abs(direct.matrix())), || format!("gap {gap:e}"))
}

fn max_time_vs_det(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let c = curvature(r);
    let c0 = uniform_c0(r);
    let b = max_invertible_time(c, &c0).map_err(|e| e.to_string())?;
    let horizon = 12.0;
    let sampled = singular_time_by_det_sampling(c, &c0, horizon, 1e-3);
    let ok = if b <= horizon { (sampled - b).abs() <= 1e-6 } else { sampled == f64::INFINITY };
    ensure(ok, || format!("c = {}: closed form {b}, sampled {sampled}", c.value()))
}

fn ray_verdict(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let c = SpaceFormCurvature::HYPERBOLIC;
    let scale = r.random_range(0.2..3.0);
    let c0 = SplittingTensor::new(uniform_c0(r).into_matrix() * scale).expect("square");
    let verdict = classify_splitting_spectrum(c, &c0, GeodesicDomain::Ray).map_err(|e| e.to_string())?;
    let b = max_invertible_time(c, &c0).map_err(|e| e.to_string())?;
    ensure(verdict.consistent == (b == f64::INFINITY), || format!("consistent = {}, b_max = {b}", verdict.consistent))
}

fn hyperbolic_decay(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let q = r.random_range(1..=5);
    let lambda = -r.random_range(0.0..=1.0);
    let (c0, a0) = sampling::skew_shifted_pair(r, q, 2, lambda);
    let c = SpaceFormCurvature::HYPERBOLIC;
    let a = shape_operator_at(&a0, c, &c0, 20.0).map_err(|e| e.to_string())?;
    let (end, start) = (a.max_abs(), a0.max_abs());
    ensure(end <= 1e-6 * start, || format!("|A(20)| = {end:e} against |A0| = {start:e}"))?;
    let report = decay_report(&a0, c, &c0, GeodesicDomain::Ray).map_err(|e| e.to_string())?;
    let ok = report.per_block.iter().all(|b| matches!(b.behavior, Behavior::DecaysToZero | Behavior::IdenticallyZero));
    ensure(ok, || format!("blocks {:?}", report.per_block.iter().map(|b| b.behavior).collect::<Vec<_>>()))
}

fn sphere_continuation(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let (c0, a0) = sampling::traceless_sphere_pair(r);
    let c = SpaceFormCurvature::SPHERE;
    let a = shape_operator_at(&a0, c, &c0, std::f64::consts::PI).map_err(|e| e.to_string())?;
    let gap = linalg::max_abs_diff(&a.ops()[0], &(-&a0.ops()[0]));
    ensure(gap <= 1e-8, || format!("|A(pi) + A0| = {gap:e}"))?;
    ensure(sign_balance_check(&a0, c, &c0).map_err(|e| e.to_string())?, || "not sign balanced".into())
}

fn special_direction(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let q = r.random_range(1..=4);
    let nu = q * (q + 1) / 2;
    let family = sampling::random_family(r, q, nu);
    let dir = find_special_nullity_direction(&family).ok_or_else(|| format!("no direction for q = {q}"))?;
    let rebuilt =
        family.combine(&dir.coeffs).map_err(|e| e.to_string())?.into_matrix() + &dir.skew_part + Matrix::identity(q, q) * dir.lambda;
    let gap = linalg::max_abs(&rebuilt);
    ensure(dir.lambda <= 0.0 && gap <= 1e-10, || format!("lambda {}, residual {gap:e}", dir.lambda))
}

fn scalar_curvature_chain(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let n = r.random_range(2..=6);
    let p = r.random_range(1..=3);
    let scale = r.random_range(0.05..2.0);
    let ops = (0..p).map(|_| sampling::random_symmetric(r, n, scale)).collect();
    let a = ShapeOperatorSet::new(n, ops).map_err(|e| e.to_string())?;
    let c = SpaceFormCurvature::HYPERBOLIC;
    let s = scalar_curvature(&a, n, c).map_err(|e| e.to_string())?;
    let nf = n as f64;
    let lhs = alpha_norm(&a).powi(2);
    let rhs = nf * nf * mean_curvature_norm(&a, n).powi(2);
    ensure((s <= -1.0) == (lhs >= rhs), || format!("s = {s}, |alpha|^2 = {lhs}, n^2|H|^2 = {rhs}"))?;
    let zero = scalar_curvature(&ShapeOperatorSet::zeros(n, p), n, c).map_err(|e| e.to_string())?;
    ensure(zero == -1.0, || format!("A = 0 gives s = {zero}"))
}

fn catalog_properties(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let n = r.random_range(2..=5);
    let k = r.random_range(1..n);
    let rho = r.random_range(0.25..4.0);
    let models = [
        catalog::hyperbolic_cylinder(k, n, rho),
        catalog::cartan_veronese_polar(),
        catalog::euclidean_cylinder(n, r.random_range(0.5..2.0)),
        catalog::totally_geodesic(n, 1, curvature(r)),
    ];
    for m in models {
        let m = m.map_err(|e| e.to_string())?;
        if let Some(bad) = m.verify().into_iter().find(|c| !c.passed) {
            return Err(format!("{}: {:?} ({})", m.name, bad.property, bad.detail));
        }
        let a = m.conullity_shape();
        ensure(m.splitting_family.basis().iter().all(|t| is_codazzi_compatible(&a, t)), || {
            format!("{} is not Codazzi compatible", m.name)
        })?;
    }
    Ok(())
}

fn radon_hurwitz_formula(r: &mut ChaCha8Rng, _step: f64) -> Result<(), String> {
    let m: u64 = r.random_range(1..=1 << 20);
    // ρ(16 m) = ρ(m) + 8 and ρ(odd · m) = ρ(m).
    let base = radon_hurwitz(m).map_err(|e| e.to_string())?;
    let up = radon_hurwitz(16 * m).map_err(|e| e.to_string())?;
    let odd = radon_hurwitz(m * (2 * r.random_range(0..1000u64) + 1)).map_err(|e| e.to_string())?;
    ensure(up == base + 8 && odd == base, || format!("m = {m}: {base}, {up}, {odd}"))
}

const SUITE: &[(&str, Trial)] = &[
    ("gauge_identity", gauge_identity),
    ("riccati_oracle", riccati_oracle),
    ("shape_oracle", shape_oracle),
    ("jacobi_residual", jacobi_residual),
    ("symmetry_propagation", symmetry_propagation),
    ("rank_signature_constancy", rank_signature),
    ("kernel_invariance", kernel_invariance),
    ("splitting_cocycle", cocycle),
    ("max_invertible_time", max_time_vs_det),
    ("ray_verdict_soundness", ray_verdict),
    ("hyperbolic_decay", hyperbolic_decay),
    ("sphere_continuation", sphere_continuation),
    ("special_direction", special_direction),
    ("scalar_curvature_chain", scalar_curvature_chain),
    ("catalog_properties", catalog_properties),
    ("radon_hurwitz_formula", radon_hurwitz_formula),
];

/// Runs `trials` cases of `check`, trial `i` of check `k` drawing from stream
/// `k · 2^32 + i` of `seed`.
fn run_one(index: usize, name: &'static str, check: Trial, seed: u64, trials: usize, step: f64) -> CheckResult {
    let mut failures = 0;
    let mut first_failure = None;
    for i in 0..trials {
        let mut r = sampling::rng(seed, ((index as u64) << 32) | i as u64);
        if let Err(msg) = check(&mut r, step) {
            failures += 1;
            first_failure.get_or_insert_with(|| format!("trial {i}: {msg}"));
        }
    }
    CheckResult { name, trials, failures, first_failure }
}

pub fn run_suite(seed: u64, trials: usize, step: f64) -> Vec<CheckResult> {
    SUITE
        .iter()
        .enumerate()
        .map(|(k, &(name, check))| run_one(k, name, check, seed, trials, step))
        .collect()
}

/// Fixed-format summary: one line per check, then the totals.
pub fn report(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} {} ({}/{} trials)\n", r.name, r.trials - r.failures, r.trials));
        if let Some(msg) = &r.first_failure {
            out.push_str(&format!("     first failure: {msg}\n"));
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    let noun = if results.len() == 1 { "check" } else { "checks" };
    out.push_str(&format!("{} {noun}, {} passed, {failed} failed\n", results.len(), results.len() - failed));
    out
}
