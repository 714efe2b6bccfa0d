//! Homogeneous runs obey `‖u^n‖ <= e^{C_κ t_n} ‖u^0‖`.

use std::f64::consts::PI;
use std::sync::Arc;

use fkdg_core::basis::{BasisSpec, DgField};
use fkdg_core::fraccalc::L1Kernel;
use fkdg_core::ldg::{assemble_operators, FluxWeights, SolverOptions, Stepper};
use fkdg_core::mesh::{GradedTimeMesh, Rect, SpatialMesh};
use fkdg_core::problems::{constant_kappa, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(rng: &mut ChaCha8Rng, alpha: f64, t: f64) -> ProblemSpec {
    let c: f64 = rng.random_range(-3.0..3.0);
    let mut p = constant_kappa(alpha, c, Arc::new(|_, _| 0.0), t).unwrap();
    if rng.random_bool(0.5) {
        let phase: f64 = rng.random_range(0.0..1.0);
        p.kappa = Arc::new(move |x, y| c * (2.0 * PI * (x + phase)).cos() * (2.0 * PI * y).sin());
        p.kappa_const = None;
    }
    p
}

#[test]
fn random_homogeneous_runs_are_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for run in 0..100 {
        let alpha = [0.3, 0.5, 0.7][run % 3];
        let steps = rng.random_range(1..=50);
        let gamma = rng.random_range(1.0..4.0);
        let t_final = rng.random_range(0.05..1.0);
        let p = random_problem(&mut rng, alpha, t_final);
        let n = rng.random_range(3..=6);
        let k = rng.random_range(0..=2);
        let fw = FluxWeights::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)).unwrap();
        let mesh = Arc::new(SpatialMesh::uniform(n, n, Rect::unit_square()).unwrap());
        let basis = BasisSpec::new(k);
        let tm = GradedTimeMesh::new(steps, gamma, t_final).unwrap();
        let ops = assemble_operators(&mesh, basis, fw);
        let a = L1Kernel::new(&tm, alpha).unwrap();
        let coeffs = (0..ops.ndofs())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let u0 = DgField::from_coeffs(mesh.clone(), basis, coeffs).unwrap();
        let n0 = u0.l2_norm();
        let mut st = Stepper::new(&ops, &a, &p, u0, SolverOptions::default()).unwrap();
        for level in 1..=steps {
            let un = st.step().unwrap().l2_norm();
            let bound = (p.c_kappa * tm.t(level)).exp() * n0 + 1e-10;
            assert!(un <= bound, "run {run}, level {level}: {un} > {bound}");
        }
    }
}
