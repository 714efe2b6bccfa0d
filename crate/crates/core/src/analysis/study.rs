use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::BasisSpec;
use crate::error::{invalid, Error, Result};
use crate::ldg::{solve_with, FluxWeights, SolverOptions};
use crate::mesh::{GradedTimeMesh, SpatialMesh};
use crate::problems::ProblemSpec;

use super::errors::ErrorMetric;
use super::report::{ErrorReport, StudyKind};

/// Everything a single run needs besides the problem and the mesh sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub basis: BasisSpec,
    pub flux: FluxWeights,
    pub steps: usize,
    pub gamma: f64,
    pub solver: SolverOptions,
    /// Gauss points per step in the error functional.
    pub quad_t: usize,
    /// Gauss points per axis in the error functional; `None` means `k + 3`.
    pub quad_x: Option<usize>,
    pub metric: ErrorMetric,
}

impl RunParams {
    pub fn new(basis: BasisSpec, flux: FluxWeights, steps: usize, gamma: f64) -> Self {
        Self {
            basis,
            flux,
            steps,
            gamma,
            solver: SolverOptions::default(),
            quad_t: 3,
            quad_x: None,
            metric: ErrorMetric::default(),
        }
    }
}

/// Error `E(h, M)` of one run on an `n x n` mesh.
pub fn spatial_run(prob: &ProblemSpec, n: usize, params: &RunParams) -> Result<f64> {
    let exact = prob.exact.clone().ok_or_else(|| {
        Error::InvalidArgument(format!("problem {} has no exact solution", prob.name))
    })?;
    let mesh = Arc::new(SpatialMesh::uniform(n, n, prob.domain)?);
    let tm = GradedTimeMesh::new(params.steps, params.gamma, prob.final_time)?;
    let traj = solve_with(prob, &mesh, &tm, params.basis, params.flux, params.solver)?;
    let qx = params.quad_x.unwrap_or(params.basis.default_quad_points());
    params
        .metric
        .evaluate(&traj, |t, x, y| exact(t, x, y), params.quad_t, qx)
}

fn metadata(prob: &ProblemSpec, params: &RunParams) -> Vec<(String, String)> {
    let mut m = vec![
        ("problem".to_string(), prob.name.clone()),
        ("alpha".to_string(), prob.alpha.to_string()),
        ("k".to_string(), params.basis.degree.to_string()),
        ("sigma1".to_string(), params.flux.sigma1.to_string()),
        ("sigma2".to_string(), params.flux.sigma2.to_string()),
        ("gamma".to_string(), params.gamma.to_string()),
        ("T".to_string(), prob.final_time.to_string()),
        ("metric".to_string(), params.metric.name().to_string()),
    ];
    if let Some(d) = prob.delta {
        m.push(("delta".to_string(), d.to_string()));
    }
    m
}

/// Refines the spatial mesh at fixed `M`; runs execute in parallel.
pub fn spatial_study(
    prob: &ProblemSpec,
    cells: &[usize],
    params: &RunParams,
    label: &str,
) -> Result<ErrorReport> {
    if cells.is_empty() {
        return invalid("no meshes given");
    }
    let errs: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&n| spatial_run(prob, n, params))
        .collect();
    let mut runs = Vec::with_capacity(cells.len());
    for (&n, e) in cells.iter().zip(errs) {
        runs.push((n, n, params.steps, e?));
    }
    let mut meta = metadata(prob, params);
    meta.push(("M".to_string(), params.steps.to_string()));
    ErrorReport::new(StudyKind::Spatial, label, &runs, meta)
}

/// Cells per axis for the coupling `h = M^{(α-2)/(k+1)}`, `N = round(1/h)`.
pub fn temporal_cells(m: usize, alpha: f64, k: usize) -> usize {
    let n = (m as f64).powf((2.0 - alpha) / (k as f64 + 1.0));
    (n.round() as usize).max(1)
}

/// Refines the time mesh with the spatial mesh coupled by [`temporal_cells`].
pub fn temporal_study(
    prob: &ProblemSpec,
    steps: &[usize],
    params: &RunParams,
    label: &str,
) -> Result<ErrorReport> {
    if steps.is_empty() {
        return invalid("no step counts given");
    }
    let errs: Vec<Result<(usize, f64)>> = steps
        .par_iter()
        .map(|&m| {
            let n = temporal_cells(m, prob.alpha, params.basis.degree);
            let p = RunParams {
                steps: m,
                ..*params
            };
            spatial_run(prob, n, &p).map(|e| (n, e))
        })
        .collect();
    let mut runs = Vec::with_capacity(steps.len());
    for (&m, e) in steps.iter().zip(errs) {
        let (n, e) = e?;
        runs.push((m, n, m, e));
    }
    let mut meta = metadata(prob, params);
    meta.push(("h".to_string(), "M^((alpha-2)/(k+1))".to_string()));
    ErrorReport::new(StudyKind::Temporal, label, &runs, meta)
}
