//! TOML experiment descriptions.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// What an experiment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Refine the spatial mesh at fixed `M`.
    SpatialConvergence,
    /// Refine `M` with the spatial mesh coupled to it.
    TemporalConvergence,
    /// Condition numbers of the last time-step matrix over a list of fluxes.
    ConditionNumber,
    /// One solve on the first mesh.
    SingleRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemName {
    Example1,
    Example2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceVariantName {
    #[default]
    Consistent,
    FlippedSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    #[default]
    TimeIntegral,
    FinalTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CondBasisName {
    #[default]
    Orthonormal,
    Legendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CondNorm {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "1")]
    One,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub name: ProblemName,
    pub alpha: f64,
    /// Regularity of the Example 2 solution; ignored for Example 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    #[serde(default)]
    pub source_variant: SourceVariantName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Cells per axis, one entry per run; `h = 1/N` on the unit square.
    #[serde(default)]
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Step counts of a temporal study; cells follow `N = round(M^{(2-α)/(k+1)})`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps_list: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flux_list: Vec<[f64; 2]>,
    /// Gauss points per axis for source and history moments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_points: Option<usize>,
    /// Largest system solved directly; larger ones use GMRES.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorConfig {
    #[serde(default)]
    pub metric: MetricName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_x: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    #[serde(default)]
    pub basis: CondBasisName,
    #[serde(default)]
    pub norm: CondNorm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// File stem of the artifacts; defaults to the experiment name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

/// Reference values checked by `run --check`. Lists may be shorter than the
/// measured ones; only the given entries are compared.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rates: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_atol: Option<f64>,
    /// Condition numbers, one per flux.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// Allowed ratio between measured and expected condition numbers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_factor: Option<f64>,
    /// Require condition numbers to decrease along the flux list.
    #[serde(default)]
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Published table the parameters come from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub kind: ExperimentKind,
    pub problem: ProblemConfig,
    #[serde(default = "empty_mesh")]
    pub mesh: MeshConfig,
    pub time: TimeConfig,
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub error: ErrorConfig,
    #[serde(default)]
    pub condition: ConditionConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub expect: ExpectConfig,
}

fn empty_mesh() -> MeshConfig {
    MeshConfig { cells: Vec::new() }
}

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let c: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Flux weights used by the runs; condition studies use the list.
    pub fn fluxes(&self) -> Vec<[f64; 2]> {
        if self.kind == ExperimentKind::ConditionNumber {
            self.discretization.flux_list.clone()
        } else {
            self.discretization.flux.into_iter().collect()
        }
    }

    pub fn final_time(&self) -> f64 {
        self.problem.final_time.unwrap_or(0.1)
    }

    pub fn stem(&self) -> &str {
        self.output.stem.as_deref().unwrap_or(&self.name)
    }

    /// Whether any flux weight sits at the central value 1/2.
    pub fn has_central_weight(&self) -> bool {
        self.fluxes().iter().any(|f| f.contains(&0.5))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return config_err("name must be a non-empty file stem");
        }
        let p = &self.problem;
        if !(p.alpha > 0.0 && p.alpha < 1.0) {
            return config_err(format!("problem.alpha must lie in (0, 1), got {}", p.alpha));
        }
        match (p.name, p.delta) {
            (ProblemName::Example2, None) => {
                return config_err("problem.delta is required for example2")
            }
            (ProblemName::Example2, Some(d)) if !(d > 0.0 && d < 2.0 && d != 1.0) => {
                return config_err(format!(
                    "problem.delta must lie in (0, 1) or (1, 2), got {d}"
                ))
            }
            _ => {}
        }
        if let Some(t) = p.final_time {
            if !(t > 0.0 && t.is_finite()) {
                return config_err(format!("problem.final_time must be positive, got {t}"));
            }
        }
        if !(self.time.gamma >= 1.0 && self.time.gamma.is_finite()) {
            return config_err(format!(
                "time.gamma must be at least 1, got {}",
                self.time.gamma
            ));
        }
        if self.discretization.degree > 8 {
            return config_err(format!(
                "discretization.degree {} exceeds the supported maximum 8",
                self.discretization.degree
            ));
        }
        let cells = &self.mesh.cells;
        if cells.contains(&0) {
            return config_err("mesh.cells entries must be positive");
        }
        let steps_ok = |s: Option<usize>| match s {
            Some(m) if m >= 1 => Ok(m),
            _ => config_err("time.steps must be given and positive"),
        };
        match self.kind {
            ExperimentKind::SpatialConvergence => {
                steps_ok(self.time.steps)?;
                if cells.len() < 2 {
                    return config_err("a spatial study needs at least two entries in mesh.cells");
                }
            }
            ExperimentKind::TemporalConvergence => {
                if self.time.steps_list.len() < 2 || self.time.steps_list.contains(&0) {
                    return config_err(
                        "a temporal study needs at least two positive entries in time.steps_list",
                    );
                }
            }
            ExperimentKind::ConditionNumber | ExperimentKind::SingleRun => {
                steps_ok(self.time.steps)?;
                if cells.is_empty() {
                    return config_err("mesh.cells must name at least one mesh");
                }
            }
        }
        if self.kind == ExperimentKind::ConditionNumber {
            if self.discretization.flux_list.is_empty() {
                return config_err("a condition-number study needs discretization.flux_list");
            }
        } else if self.discretization.flux.is_none() {
            return config_err("discretization.flux is required");
        }
        for f in self.fluxes() {
            if f.iter().any(|s| !(0.0..=1.0).contains(s)) {
                return config_err(format!("flux weights must lie in [0, 1], got {f:?}"));
            }
        }
        if let Some(q) = self.error.quad_t {
            if !(2..=64).contains(&q) {
                return config_err(format!("error.quad_t must lie in 2..=64, got {q}"));
            }
        }
        for (what, q) in [
            ("error.quad_x", self.error.quad_x),
            (
                "discretization.quad_points",
                self.discretization.quad_points,
            ),
        ] {
            if let Some(q) = q {
                if !(1..=64).contains(&q) {
                    return config_err(format!("{what} must lie in 1..=64, got {q}"));
                }
            }
        }
        let e = &self.expect;
        for (what, tol) in [
            ("expect.error_rtol", e.error_rtol),
            ("expect.rate_atol", e.rate_atol),
        ] {
            if let Some(t) = tol {
                if !(t >= 0.0) {
                    return config_err(format!("{what} must be non-negative"));
                }
            }
        }
        if let Some(f) = e.value_factor {
            if !(f >= 1.0) {
                return config_err("expect.value_factor must be at least 1");
            }
        }
        if !e.values.is_empty() && self.kind != ExperimentKind::ConditionNumber {
            return config_err("expect.values only applies to condition-number studies");
        }
        Ok(())
    }
}
