use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::{l2_project, BasisSpec, DgField, VolumeQuad};
use crate::error::{invalid, Result};
use crate::fraccalc::{substantial_history, L1Kernel};
use crate::mesh::{GradedTimeMesh, SpatialMesh};
use crate::problems::ProblemSpec;
use crate::sparse::{ShiftedSystem, SolverKind};

use super::assemble::{assemble_operators, LdgOperators};
use super::flux::FluxWeights;

/// Knobs for the fully discrete solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Gauss points per axis for volume integrals; `None` means `k + 3`.
    pub quad_points: Option<usize>,
    /// Largest system solved by sparse LU; larger ones use GMRES.
    pub direct_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            quad_points: None,
            direct_limit: 20_000,
        }
    }
}

/// Numerical solution at every time level.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub fields: Vec<DgField>,
    pub time_mesh: GradedTimeMesh,
    pub problem: ProblemSpec,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn last(&self) -> &DgField {
        self.fields.last().expect("trajectory holds u^0")
    }
}

/// Advances the fully discrete scheme one level at a time.
pub struct Stepper<'a> {
    ops: &'a LdgOperators,
    kernel: &'a L1Kernel,
    problem: &'a ProblemSpec,
    vq: VolumeQuad,
    kappa: Vec<f64>,
    /// `u^l` at the quadrature points
    history: Vec<Vec<f64>>,
    fields: Vec<DgField>,
    system: ShiftedSystem,
    last_residual: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(
        ops: &'a LdgOperators,
        kernel: &'a L1Kernel,
        problem: &'a ProblemSpec,
        u0: DgField,
        opts: SolverOptions,
    ) -> Result<Self> {
        let basis = ops.basis;
        let nq = opts.quad_points.unwrap_or(basis.default_quad_points());
        let vq = VolumeQuad::new(&ops.mesh, basis, crate::basis::gauss_rule(nq)?);
        let kappa = vq.eval_fn(|x, y| problem.kappa_at(x, y));
        let system = ShiftedSystem::new(&ops.k, ops.mass.clone(), opts.direct_limit)?;
        let history = vec![vq.eval_field(&u0)];
        Ok(Self {
            ops,
            kernel,
            problem,
            vq,
            kappa,
            history,
            fields: vec![u0],
            system,
            last_residual: 0.0,
        })
    }

    /// Index of the next level to compute.
    pub fn next_level(&self) -> usize {
        self.fields.len()
    }

    pub fn solver_kind(&self) -> SolverKind {
        self.system.kind()
    }

    pub fn last_residual(&self) -> f64 {
        self.last_residual
    }

    pub fn fields(&self) -> &[DgField] {
        &self.fields
    }

    pub fn into_fields(self) -> Vec<DgField> {
        self.fields
    }

    /// Solves `(A_0^n M + K) U^n = (f(t_n) - H^n, v)` for the next level `n`,
    /// where `H^n` is the known history part of the discrete derivative.
    pub fn step(&mut self) -> Result<&DgField> {
        let n = self.next_level();
        if n > self.kernel.steps() {
            return invalid(format!("time mesh has only {} steps", self.kernel.steps()));
        }
        let ppc = self.vq.points_per_cell();
        let hist = substantial_history(self.kernel, &self.kappa, &self.history, n, ppc)?;
        let tn = self.kernel.t(n);
        // the history term moves to the right-hand side with a sign flip
        let mut rhs_q: Vec<f64> = hist.iter().map(|h| -h).collect();
        if let Some(f) = &self.problem.source {
            rhs_q
                .par_iter_mut()
                .zip(self.vq.x.par_iter().zip(&self.vq.y))
                .for_each(|(r, (&x, &y))| {
                    *r += f(tn, x, y);
                });
        }
        let rhs = self.vq.moments(&rhs_q, self.ops.mesh.num_cells());
        self.system.set_shift(self.kernel.a(n, 0))?;
        let (coeffs, stats) = self.system.solve(&rhs)?;
        self.last_residual = stats.relative_residual;
        let u = DgField::from_coeffs(self.ops.mesh.clone(), self.ops.basis, coeffs)?;
        self.history.push(self.vq.eval_field(&u));
        self.fields.push(u);
        Ok(self.fields.last().unwrap())
    }
}

/// Runs the scheme over the whole time mesh with default options.
pub fn solve(
    prob: &ProblemSpec,
    mesh: &Arc<SpatialMesh>,
    tm: &GradedTimeMesh,
    basis: BasisSpec,
    fw: FluxWeights,
) -> Result<Trajectory> {
    solve_with(prob, mesh, tm, basis, fw, SolverOptions::default())
}

pub fn solve_with(
    prob: &ProblemSpec,
    mesh: &Arc<SpatialMesh>,
    tm: &GradedTimeMesh,
    basis: BasisSpec,
    fw: FluxWeights,
    opts: SolverOptions,
) -> Result<Trajectory> {
    let ops = assemble_operators(mesh, basis, fw);
    let kernel = L1Kernel::new(tm, prob.alpha)?;
    let rule = crate::basis::gauss_rule(opts.quad_points.unwrap_or(basis.default_quad_points()))?;
    let u0 = l2_project(|x, y| (prob.u0)(x, y), mesh, basis, &rule);
    let mut stepper = Stepper::new(&ops, &kernel, prob, u0, opts)?;
    for _ in 1..=tm.steps() {
        stepper.step()?;
    }
    Ok(Trajectory {
        fields: stepper.into_fields(),
        time_mesh: tm.clone(),
        problem: prob.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;
    use crate::problems::{constant_kappa, example1};

    fn mesh(n: usize) -> Arc<SpatialMesh> {
        Arc::new(SpatialMesh::uniform(n, n, Rect::unit_square()).unwrap())
    }

    #[test]
    fn zero_stays_zero() {
        let p = constant_kappa(0.5, 1.0, Arc::new(|_, _| 0.0), 1.0).unwrap();
        let tm = GradedTimeMesh::new(5, 2.0, 1.0).unwrap();
        let tr = solve(
            &p,
            &mesh(4),
            &tm,
            BasisSpec::new(1),
            FluxWeights::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(tr.len(), 6);
        assert!(tr
            .fields
            .iter()
            .all(|f| f.coeffs().iter().all(|&c| c == 0.0)));
    }

    #[test]
    fn constants_are_steady() {
        let p = constant_kappa(0.4, 0.0, Arc::new(|_, _| 2.0), 1.0).unwrap();
        let tm = GradedTimeMesh::new(8, 3.0, 1.0).unwrap();
        let tr = solve(
            &p,
            &mesh(3),
            &tm,
            BasisSpec::new(2),
            FluxWeights::new(0.7, 0.2).unwrap(),
        )
        .unwrap();
        for f in &tr.fields {
            for (x, y) in [(0.1, 0.1), (0.5, 0.77)] {
                assert!((f.eval(x, y) - 2.0).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn no_steps() {
        let p = example1(0.7).unwrap();
        let tm = GradedTimeMesh::new(0, 2.0, 0.1).unwrap();
        let tr = solve(
            &p,
            &mesh(4),
            &tm,
            BasisSpec::new(0),
            FluxWeights::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(tr.len(), 1);
    }

    #[test]
    fn first_step_is_stable() {
        let p = example1(0.7).unwrap();
        let tm = GradedTimeMesh::new(20, 2.0, 0.1).unwrap();
        let tr = solve(
            &p,
            &mesh(12),
            &tm,
            BasisSpec::new(0),
            FluxWeights::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        let n0 = tr.fields[0].l2_norm();
        for (n, f) in tr.fields.iter().enumerate() {
            assert!(f.l2_norm() <= (2.0 * tm.t(n)).exp() * n0 + 1e-12);
        }
    }

    #[test]
    fn iterative_path_matches_direct() {
        let p = example1(0.5).unwrap();
        let tm = GradedTimeMesh::new(4, 2.0, 0.1).unwrap();
        let m = mesh(5);
        let fw = FluxWeights::new(0.8, 0.3).unwrap();
        let a = solve_with(&p, &m, &tm, BasisSpec::new(1), fw, SolverOptions::default()).unwrap();
        let b = solve_with(
            &p,
            &m,
            &tm,
            BasisSpec::new(1),
            fw,
            SolverOptions {
                direct_limit: 0,
                ..Default::default()
            },
        )
        .unwrap();
        for (x, y) in a.last().coeffs().iter().zip(b.last().coeffs()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
