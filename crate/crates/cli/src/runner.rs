//! Executes an experiment and renders its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fkdg_core::analysis::{
    condition_of_system, spatial_run, spatial_study, temporal_study, CondBasis, CondOptions,
    ErrorMetric, ErrorReport, RunParams, StudyKind,
};
use fkdg_core::basis::BasisSpec;
use fkdg_core::fraccalc::L1Kernel;
use fkdg_core::ldg::{assemble_operators, FluxWeights, SolverOptions};
use fkdg_core::mesh::{GradedTimeMesh, SpatialMesh};
use fkdg_core::problems::{example1, example2_with, ProblemSpec, SourceVariant};
use rayon::prelude::*;

use crate::config::{
    CondBasisName, CondNorm, ExperimentConfig, ExperimentKind, MetricName, ProblemName,
    SourceVariantName,
};
use crate::error::{CliError, CliResult};
use crate::svg::{loglog_plot, Series};

/// Condition numbers for one flux setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CondRow {
    pub flux: [f64; 2],
    pub cond2: f64,
    pub cond1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StudyOutput {
    Refinement(ErrorReport),
    Condition(Vec<CondRow>),
}

/// One comparison against a configured expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub label: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: String,
    pub pass: bool,
}

impl CheckLine {
    pub fn render(&self) -> String {
        format!(
            "{} {}: measured {:.4e}, expected {:.4e} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.label,
            self.measured,
            self.expected,
            self.tolerance
        )
    }
}

pub fn build_problem(c: &ExperimentConfig) -> CliResult<ProblemSpec> {
    let p = &c.problem;
    let spec = match p.name {
        ProblemName::Example1 => example1(p.alpha)?,
        ProblemName::Example2 => {
            let variant = match p.source_variant {
                SourceVariantName::Consistent => SourceVariant::Consistent,
                SourceVariantName::FlippedSign => SourceVariant::FlippedSign,
            };
            let delta = p
                .delta
                .ok_or_else(|| CliError::Config("problem.delta is required for example2".into()))?;
            example2_with(p.alpha, delta, variant)?
        }
    };
    Ok(spec.with_final_time(c.final_time())?)
}

fn flux(f: [f64; 2]) -> CliResult<FluxWeights> {
    Ok(FluxWeights::new(f[0], f[1])?)
}

fn run_params(c: &ExperimentConfig) -> CliResult<RunParams> {
    let d = &c.discretization;
    let f = flux(
        d.flux
            .ok_or_else(|| CliError::Config("discretization.flux is required".into()))?,
    )?;
    let mut p = RunParams::new(
        BasisSpec::new(d.degree),
        f,
        c.time.steps.unwrap_or(0),
        c.time.gamma,
    );
    let mut solver = SolverOptions::default();
    if d.quad_points.is_some() {
        solver.quad_points = d.quad_points;
    }
    if let Some(l) = d.direct_limit {
        solver.direct_limit = l;
    }
    p.solver = solver;
    if let Some(q) = c.error.quad_t {
        p.quad_t = q;
    }
    p.quad_x = c.error.quad_x;
    p.metric = match c.error.metric {
        MetricName::TimeIntegral => ErrorMetric::TimeIntegral,
        MetricName::FinalTime => ErrorMetric::FinalTime,
    };
    Ok(p)
}

fn row_label(c: &ExperimentConfig) -> String {
    let p = &c.problem;
    match c.kind {
        ExperimentKind::TemporalConvergence => {
            format!(
                "({},{},{})",
                p.alpha,
                p.delta.unwrap_or(p.alpha),
                c.time.gamma
            )
        }
        _ => {
            let f = c.discretization.flux.unwrap_or([0.0, 0.0]);
            format!("({},{},{})", f[0], f[1], p.alpha)
        }
    }
}

/// Runs the experiment described by `c`.
pub fn run(c: &ExperimentConfig) -> CliResult<StudyOutput> {
    c.validate()?;
    let prob = build_problem(c)?;
    let label = row_label(c);
    match c.kind {
        ExperimentKind::SpatialConvergence => Ok(StudyOutput::Refinement(spatial_study(
            &prob,
            &c.mesh.cells,
            &run_params(c)?,
            &label,
        )?)),
        ExperimentKind::TemporalConvergence => Ok(StudyOutput::Refinement(temporal_study(
            &prob,
            &c.time.steps_list,
            &run_params(c)?,
            &label,
        )?)),
        ExperimentKind::SingleRun => {
            let params = run_params(c)?;
            let n = c.mesh.cells[0];
            let e = spatial_run(&prob, n, &params)?;
            let report = ErrorReport::new(
                StudyKind::Spatial,
                label,
                &[(n, n, params.steps, e)],
                Vec::new(),
            )?;
            Ok(StudyOutput::Refinement(report))
        }
        ExperimentKind::ConditionNumber => {
            let n = c.mesh.cells[0];
            let m = c.time.steps.unwrap_or(1);
            let mesh = Arc::new(SpatialMesh::uniform(n, n, prob.domain)?);
            let tm = GradedTimeMesh::new(m, c.time.gamma, prob.final_time)?;
            let a = L1Kernel::new(&tm, prob.alpha)?;
            let basis = match c.condition.basis {
                CondBasisName::Orthonormal => CondBasis::Orthonormal,
                CondBasisName::Legendre => CondBasis::Legendre,
            };
            let mut opts = CondOptions::default();
            if let Some(it) = c.condition.max_iter {
                opts.max_iter = it;
            }
            if let Some(t) = c.condition.tol {
                opts.tol = t;
            }
            let rows: Vec<CliResult<CondRow>> = c
                .discretization
                .flux_list
                .par_iter()
                .map(|&f| {
                    let ops = assemble_operators(
                        &mesh,
                        BasisSpec::new(c.discretization.degree),
                        flux(f)?,
                    );
                    let e = condition_of_system(&ops, &a, m, basis, opts)?;
                    Ok(CondRow {
                        flux: f,
                        cond2: e.cond2,
                        cond1: e.cond1,
                    })
                })
                .collect();
            Ok(StudyOutput::Condition(
                rows.into_iter().collect::<CliResult<Vec<_>>>()?,
            ))
        }
    }
}

fn selected(c: &ExperimentConfig, r: &CondRow) -> f64 {
    match c.condition.norm {
        CondNorm::Two => r.cond2,
        CondNorm::One => r.cond1,
    }
}

/// Compares `out` with the expectations of `c`.
pub fn check(c: &ExperimentConfig, out: &StudyOutput) -> Vec<CheckLine> {
    let e = &c.expect;
    let mut lines = Vec::new();
    match out {
        StudyOutput::Refinement(report) => {
            let rtol = e.error_rtol.unwrap_or(0.05);
            for (i, (&exp, row)) in e.errors.iter().zip(&report.rows).enumerate() {
                lines.push(CheckLine {
                    label: format!("error[{i}]"),
                    measured: row.error,
                    expected: exp,
                    tolerance: format!("rel {rtol}"),
                    pass: (row.error - exp).abs() <= rtol * exp.abs(),
                });
            }
            let atol = e.rate_atol.unwrap_or(0.05);
            for (i, (&exp, got)) in e.rates.iter().zip(report.rates()).enumerate() {
                lines.push(CheckLine {
                    label: format!("rate[{i}]"),
                    measured: got,
                    expected: exp,
                    tolerance: format!("abs {atol}"),
                    pass: (got - exp).abs() <= atol,
                });
            }
            if e.errors.len() > report.rows.len() || e.rates.len() > report.rates().len() {
                lines.push(missing());
            }
        }
        StudyOutput::Condition(rows) => {
            let factor = e.value_factor.unwrap_or(1.05);
            for (&exp, r) in e.values.iter().zip(rows) {
                let v = selected(c, r);
                let ratio = (v / exp).max(exp / v);
                lines.push(CheckLine {
                    label: format!("cond({},{})", r.flux[0], r.flux[1]),
                    measured: v,
                    expected: exp,
                    tolerance: format!("factor {factor}"),
                    pass: ratio <= factor,
                });
            }
            if e.values.len() > rows.len() {
                lines.push(missing());
            }
            if e.decreasing {
                for w in rows.windows(2) {
                    let (a, b) = (selected(c, &w[0]), selected(c, &w[1]));
                    lines.push(CheckLine {
                        label: format!(
                            "decrease ({},{})->({},{})",
                            w[0].flux[0], w[0].flux[1], w[1].flux[0], w[1].flux[1]
                        ),
                        measured: b,
                        expected: a,
                        tolerance: "measured < expected".into(),
                        pass: b < a,
                    });
                }
            }
        }
    }
    lines
}

fn missing() -> CheckLine {
    CheckLine {
        label: "expectation count".into(),
        measured: f64::NAN,
        expected: f64::NAN,
        tolerance: "more expectations than measurements".into(),
        pass: false,
    }
}

/// CSV artifact; refinement studies use the `param,error,rate` schema.
pub fn csv(out: &StudyOutput) -> String {
    match out {
        StudyOutput::Refinement(r) => r.to_csv(),
        StudyOutput::Condition(rows) => {
            let mut s = String::from("sigma1,sigma2,cond2,cond1\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{:.4e},{:.4e}",
                    r.flux[0], r.flux[1], r.cond2, r.cond1
                );
            }
            s
        }
    }
}

/// Human-readable table with the experiment header.
pub fn text(c: &ExperimentConfig, out: &StudyOutput) -> String {
    let mut s = format!("# {}", c.name);
    if let Some(t) = &c.table {
        let _ = write!(s, " ({t})");
    }
    s.push('\n');
    if let Some(d) = &c.description {
        let _ = writeln!(s, "# {d}");
    }
    match out {
        StudyOutput::Refinement(r) => s += &r.to_text(),
        StudyOutput::Condition(rows) => {
            let _ = writeln!(
                s,
                "(Q^{},{}) \\ (s1,s2)",
                c.discretization.degree, c.problem.alpha
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "  ({:>4},{:>4})  cond2 {:>11.4e}  cond1 {:>11.4e}",
                    r.flux[0], r.flux[1], r.cond2, r.cond1
                );
            }
        }
    }
    s
}

/// SVG of error against `h` (spatial) or `1/M` (temporal) with slope guides.
pub fn plot(c: &ExperimentConfig, out: &StudyOutput) -> Option<String> {
    let StudyOutput::Refinement(r) = out else {
        return None;
    };
    if r.rows.len() < 2 {
        return None;
    }
    let points = r
        .rows
        .iter()
        .map(|row| (1.0 / row.param as f64, row.error))
        .collect();
    let x_label = match r.kind {
        StudyKind::Spatial => "h",
        StudyKind::Temporal => "1/M",
    };
    let series = [Series {
        label: r.label.clone(),
        points,
    }];
    Some(loglog_plot(
        &c.name,
        x_label,
        "error",
        &series,
        &[1.0, 2.0, 3.0],
    ))
}

fn write(path: PathBuf, contents: &str) -> CliResult<PathBuf> {
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `<stem>.csv`, `<stem>.txt` and, if asked, `<stem>.svg` into `dir`.
pub fn write_artifacts(
    c: &ExperimentConfig,
    out: &StudyOutput,
    dir: &Path,
    with_plot: bool,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let stem = c.stem();
    let mut written = vec![
        write(dir.join(format!("{stem}.csv")), &csv(out))?,
        write(dir.join(format!("{stem}.txt")), &text(c, out))?,
    ];
    if with_plot {
        if let Some(svg) = plot(c, out) {
            written.push(write(dir.join(format!("{stem}.svg")), &svg)?);
        }
    }
    Ok(written)
}
