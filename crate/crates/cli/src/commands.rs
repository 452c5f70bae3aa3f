//! One function per mode. Each returns the text of its output file plus a
//! short human-readable summary, without touching the filesystem.

use std::fmt::Write as _;

use nullity_core::catalog::{ModelSubmanifold, PropertyCheck};
use nullity_core::linalg;
use nullity_core::oracle::{riccati_trajectory, shape_ode_trajectory};
use nullity_core::theorems::{find_special_nullity_direction, theorem1_pipeline, SpecialDirection};
use nullity_core::{
    classify_splitting_spectrum, decay_report, is_codazzi_compatible, jacobi_tensor, max_invertible_time,
    shape_operator_at, sign_balance_check, splitting_tensor_at, AlphaLimit, CurvatureBranch, DecayReport,
    NullityError, SpectrumVerdict,
};
use serde::Serialize;

use crate::checks;
use crate::scenario::{Mode, Scenario};
use crate::CliError;

/// Output of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub mode: Mode,
    pub contents: String,
    pub summary: String,
    /// The run completed but reported failures (checks or catalog properties).
    pub failed: bool,
}

pub struct Options {
    pub seed: Option<u64>,
    pub step: f64,
}

pub fn execute(mode: Mode, scenario: &Scenario, opts: &Options) -> Result<Outcome, CliError> {
    match mode {
        Mode::Evolve => evolve(scenario, opts.step),
        Mode::Classify => classify(scenario),
        Mode::Search => search(scenario),
        Mode::Catalog => catalog(scenario),
        Mode::Check => check(scenario, opts),
    }
}

fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

fn to_toml<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("records are TOML-representable")
}

pub fn evolve(s: &Scenario, step: f64) -> Result<Outcome, CliError> {
    let c = s.curvature()?;
    let c0 = s.splitting()?;
    let a0 = s.shapes(Some(c0.dim()))?;
    let grid = s.time_grid()?;
    let b_max = max_invertible_time(c, &c0)?;
    if grid.t_end >= b_max {
        return Err(NullityError::SingularJacobi { t: grid.t_end, b_max }.into());
    }
    let times = grid.times();
    // The oracle columns are NaN wherever RK4 overflows its guard.
    let rk4_c = riccati_trajectory(c, &c0, &times, step).ok();
    let rk4_a = shape_ode_trajectory(&a0, c, &c0, &times, step).ok();

    let p = a0.len();
    let q = c0.dim();
    let mut header = vec!["t".to_string(), "det_J".into(), "norm_C".into()];
    header.extend((0..p).map(|i| format!("norm_A{i}")));
    for i in 0..p {
        header.extend((0..q).map(|j| format!("eig_A{i}_{j}")));
    }
    header.extend(["rk4_dev_C".to_string(), "rk4_dev_A".into()]);
    let mut out = header.join(",");
    out.push('\n');

    let mut last_norm = 0.0_f64;
    for (k, &t) in times.iter().enumerate() {
        let ct = splitting_tensor_at(c, &c0, t)?;
        let at = shape_operator_at(&a0, c, &c0, t)?;
        let mut row = vec![t, jacobi_tensor(c, &c0, t).mat.determinant(), linalg::spectral_norm(ct.matrix())];
        row.extend(at.ops().iter().map(linalg::spectral_norm));
        for a in at.ops() {
            row.extend(linalg::symmetric_eigenvalues(a));
        }
        row.push(rk4_c.as_ref().map_or(f64::NAN, |r| linalg::max_abs_diff(ct.matrix(), r[k].matrix())));
        row.push(rk4_a.as_ref().map_or(f64::NAN, |r| {
            at.ops().iter().zip(r[k].ops()).map(|(x, y)| linalg::max_abs_diff(x, y)).fold(0.0, f64::max)
        }));
        last_norm = at.ops().iter().map(linalg::spectral_norm).fold(0.0, f64::max);
        out.push_str(&row.into_iter().map(csv_float).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    Ok(Outcome {
        mode: Mode::Evolve,
        contents: out,
        summary: format!("{} samples to t = {}, final max |A| = {last_norm:e}", times.len(), grid.t_end),
        failed: false,
    })
}

#[derive(Serialize)]
struct VerdictRecord {
    summary: String,
    b_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    codazzi_compatible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_balanced: Option<bool>,
    spectrum: SpectrumVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay: Option<DecayReport>,
}

pub fn verdict_summary(v: &SpectrumVerdict) -> String {
    match (v.applied_clause, v.violated_clause) {
        (_, Some(clause)) => format!("violates {clause}"),
        (Some(clause), None) => format!("consistent with {clause}"),
        (None, None) => "no clause applies".into(),
    }
}

pub fn classify(s: &Scenario) -> Result<Outcome, CliError> {
    let c = s.curvature()?;
    let c0 = s.splitting()?;
    let a0 = s.shapes(Some(c0.dim()))?;
    let domain = s.domain()?;
    let spectrum = classify_splitting_spectrum(c, &c0, domain)?;
    let mut summary = verdict_summary(&spectrum);

    let compatible = (!a0.is_empty()).then(|| is_codazzi_compatible(&a0, &c0));
    let mut decay = None;
    let mut sign_balanced = None;
    if compatible.is_some() && spectrum.consistent {
        if domain.is_complete_forward() && c.branch() != CurvatureBranch::Spherical {
            let report = decay_report(&a0, c, &c0, domain)?;
            let _ = write!(summary, "; alpha limit {:?}", report.global_alpha_limit);
            decay = Some(report);
        }
        if c.branch() == CurvatureBranch::Spherical
            && compatible == Some(true)
            && linalg::real_eigenvalues(c0.matrix())?.is_empty()
        {
            let balanced = sign_balance_check(&a0, c, &c0)?;
            let _ = write!(summary, "; sign balanced {balanced}");
            sign_balanced = Some(balanced);
        }
    }
    let record = VerdictRecord {
        summary: summary.clone(),
        b_max: max_invertible_time(c, &c0)?,
        codazzi_compatible: compatible,
        sign_balanced,
        spectrum,
        decay,
    };
    Ok(Outcome { mode: Mode::Classify, contents: to_toml(&record), summary, failed: false })
}

#[derive(Serialize)]
struct PipelineRecord {
    reversed: bool,
    boundary_case: bool,
    global_alpha_limit: AlphaLimit,
}

#[derive(Serialize)]
struct SearchRecord {
    status: &'static str,
    nu0: usize,
    q: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<SpecialDirection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pipeline: Option<PipelineRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pipeline_error: Option<String>,
}

pub fn search(s: &Scenario) -> Result<Outcome, CliError> {
    let family = s.splitting_family()?;
    let direction = find_special_nullity_direction(&family);
    let mut record = SearchRecord {
        status: if direction.is_some() { "found" } else { "absent" },
        nu0: family.len(),
        q: family.q(),
        direction: direction.clone(),
        pipeline: None,
        pipeline_error: None,
    };
    let a0 = s.shapes(Some(family.q()))?;
    if let (Some(c), Some(_), false) = (s.c, &direction, a0.is_empty()) {
        let c = s.curvature().map_err(|_| CliError::Parse(format!("bad curvature {c}")))?;
        match theorem1_pipeline(&family, &a0, c) {
            Ok(r) => {
                record.pipeline = Some(PipelineRecord {
                    reversed: r.reversed,
                    boundary_case: r.boundary_case,
                    global_alpha_limit: r.decay.global_alpha_limit,
                })
            }
            Err(e) => record.pipeline_error = Some(e.to_string()),
        }
    }
    let summary = match &direction {
        Some(d) => format!("found direction with lambda = {}", d.lambda),
        None => "absent".into(),
    };
    Ok(Outcome { mode: Mode::Search, contents: to_toml(&record), summary, failed: false })
}

#[derive(Serialize)]
struct CatalogRecord {
    principal_curvatures: Vec<Vec<f64>>,
    model: ModelSubmanifold,
    checks: Vec<PropertyCheck>,
}

pub fn catalog(s: &Scenario) -> Result<Outcome, CliError> {
    let model = s.catalog_entry()?.build()?;
    let checks = model.verify();
    let passed = checks.iter().filter(|c| c.passed).count();
    let summary = format!("{}: {passed}/{} properties hold", model.name, checks.len());
    let failed = passed != checks.len();
    let record = CatalogRecord { principal_curvatures: model.principal_curvatures(), model, checks };
    Ok(Outcome { mode: Mode::Catalog, contents: to_toml(&record), summary, failed })
}

pub fn check(s: &Scenario, opts: &Options) -> Result<Outcome, CliError> {
    let seed = opts.seed.or(s.seed).unwrap_or(checks::DEFAULT_SEED);
    let trials = s.trials.unwrap_or(checks::DEFAULT_TRIALS);
    let results = checks::run_suite(seed, trials, opts.step);
    let report = checks::report(&results);
    let failed = results.iter().any(|r| !r.passed());
    let summary = report.lines().last().unwrap_or_default().to_string();
    Ok(Outcome { mode: Mode::Check, contents: report, summary, failed })
}
