//! Scenario documents: one TOML file per run, matrices as row-major arrays.

use std::path::Path;

use nullity_core::catalog::{self, ModelSubmanifold};
use nullity_core::linalg::{self, Matrix};
use nullity_core::{
    GeodesicDomain, NullityError, ShapeOperatorSet, SpaceFormCurvature, SplittingFamily, SplittingTensor,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Evolve,
    Classify,
    Search,
    Catalog,
    Check,
}

impl Mode {
    pub fn output_extension(self) -> &'static str {
        match self {
            Mode::Evolve => "trajectory.csv",
            Mode::Classify => "verdict.toml",
            Mode::Search => "search.toml",
            Mode::Catalog => "catalog.toml",
            Mode::Check => "check.txt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(|i| self.t_end * i as f64 / last).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogEntry {
    TotallyGeodesic { n: usize, p: usize, c: f64 },
    HyperbolicCylinder { k: usize, n: usize, rho: f64 },
    CartanVeronesePolar,
    EuclideanCylinder { n: usize, kappa: f64 },
}

impl CatalogEntry {
    pub fn build(&self) -> Result<ModelSubmanifold, NullityError> {
        match *self {
            CatalogEntry::TotallyGeodesic { n, p, c } => catalog::totally_geodesic(n, p, SpaceFormCurvature::new(c)?),
            CatalogEntry::HyperbolicCylinder { k, n, rho } => catalog::hyperbolic_cylinder(k, n, rho),
            CatalogEntry::CartanVeronesePolar => catalog::cartan_veronese_polar(),
            CatalogEntry::EuclideanCylinder { n, kappa } => catalog::euclidean_cylinder(n, kappa),
        }
    }
}

type Rows = Vec<Vec<f64>>;

/// A scenario as written on disk. Which fields are required depends on the
/// mode; the accessors below report what is missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(rename = "C0", skip_serializing_if = "Option::is_none")]
    pub c0: Option<Rows>,
    #[serde(rename = "A0", default, skip_serializing_if = "Vec::is_empty")]
    pub a0: Vec<Rows>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub family: Vec<Rows>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<GeodesicDomain>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<TimeGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogEntry>,
}

fn missing(field: &str) -> CliError {
    CliError::Parse(format!("scenario is missing `{field}`"))
}

fn matrix(rows: &Rows, what: &str) -> Result<Matrix, CliError> {
    linalg::from_rows(rows).ok_or_else(|| CliError::Parse(format!("{what} has rows of different lengths")))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if let Some(g) = s.t_grid {
            if g.t_start != 0.0 {
                return Err(CliError::Parse("t_grid.t_start must be 0".into()));
            }
            if g.samples < 2 || !(g.t_end > 0.0 && g.t_end.is_finite()) {
                return Err(CliError::Parse("t_grid needs samples >= 2 and a positive finite t_end".into()));
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical formatting; `parse(to_toml(s)) == s`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are TOML-representable")
    }

    pub fn curvature(&self) -> Result<SpaceFormCurvature, CliError> {
        let c = self.c.ok_or_else(|| missing("c"))?;
        SpaceFormCurvature::new(c).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn splitting(&self) -> Result<SplittingTensor, CliError> {
        let m = matrix(self.c0.as_ref().ok_or_else(|| missing("C0"))?, "C0")?;
        if !m.is_square() {
            return Err(NullityError::DimensionMismatch(format!("C0 is {}x{}", m.nrows(), m.ncols())).into());
        }
        Ok(SplittingTensor::new(m)?)
    }

    /// Shape operators; dimensions are checked against `q` when given.
    pub fn shapes(&self, q: Option<usize>) -> Result<ShapeOperatorSet, CliError> {
        let ops = self
            .a0
            .iter()
            .enumerate()
            .map(|(i, rows)| matrix(rows, &format!("A0[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let dim = q.or_else(|| ops.first().map(Matrix::nrows)).unwrap_or(0);
        match ShapeOperatorSet::new(dim, ops) {
            Err(NullityError::NotSymmetric { index, asymmetry }) => {
                Err(CliError::Parse(format!("A0[{index}] is not symmetric (relative asymmetry {asymmetry:e})")))
            }
            other => Ok(other?),
        }
    }

    pub fn splitting_family(&self) -> Result<SplittingFamily, CliError> {
        if self.family.is_empty() {
            return Err(missing("family"));
        }
        let members = self
            .family
            .iter()
            .enumerate()
            .map(|(i, rows)| matrix(rows, &format!("family[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let q = members[0].nrows();
        let tensors = members
            .into_iter()
            .map(|m| {
                if m.is_square() {
                    Ok(SplittingTensor::new(m)?)
                } else {
                    Err(NullityError::DimensionMismatch(format!("family member is {}x{}", m.nrows(), m.ncols())).into())
                }
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(SplittingFamily::new(q, tensors)?)
    }

    pub fn domain(&self) -> Result<GeodesicDomain, CliError> {
        let d = self.domain.ok_or_else(|| missing("domain"))?;
        if let GeodesicDomain::Segment { b } = d {
            GeodesicDomain::segment(b).map_err(|e| CliError::Parse(e.to_string()))?;
        }
        Ok(d)
    }

    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        self.t_grid.ok_or_else(|| missing("t_grid"))
    }

    pub fn catalog_entry(&self) -> Result<&CatalogEntry, CliError> {
        self.catalog.as_ref().ok_or_else(|| missing("catalog"))
    }
}
