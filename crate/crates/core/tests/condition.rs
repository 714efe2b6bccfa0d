//! Condition-number estimates against dense eigenvalues and the trend of the
//! time-stepping matrix in the flux weights.

use std::sync::Arc;

use fkdg_core::analysis::{condition_of_system, estimate_condition, CondBasis, CondOptions};
use fkdg_core::basis::BasisSpec;
use fkdg_core::fraccalc::L1Kernel;
use fkdg_core::ldg::{assemble_operators, FluxWeights};
use fkdg_core::mesh::{GradedTimeMesh, Rect, SpatialMesh};
use fkdg_core::sparse::CsrMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[test]
fn spd_matrix_matches_eigenvalue_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for trial in 0..3 {
        let n = 50;
        let b: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let shift = 0.5 + trial as f64;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = (0..n).map(|k| b[k][i] * b[k][j]).sum::<f64>()
                    + if i == j { shift } else { 0.0 };
            }
        }
        let ev = jacobi_eigenvalues(a.clone());
        let (lo, hi) = ev
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        let trip: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, a[i][j]))
            .collect();
        let m = CsrMatrix::from_triplets(n, n, &trip);
        let est = estimate_condition(&m, CondOptions::default()).unwrap();
        let exact = hi / lo;
        assert!(
            (est.cond2 - exact).abs() <= 0.01 * exact,
            "trial {trial}: {} vs {exact}",
            est.cond2
        );
        // 1-norm and 2-norm condition numbers agree within the dimension factor
        assert!(est.cond1 >= exact / n as f64 && est.cond1 <= exact * n as f64);
    }
}

#[test]
fn decreases_towards_central_weights() {
    let mesh = Arc::new(SpatialMesh::uniform(12, 12, Rect::unit_square()).unwrap());
    let weights = [(1.0, 0.0), (0.9, 0.1), (0.8, 0.2), (0.7, 0.3)];
    for (alpha, gamma) in [(0.3, 6.0), (0.7, 2.0)] {
        let tm = GradedTimeMesh::new(100, gamma, 0.1).unwrap();
        let a = L1Kernel::new(&tm, alpha).unwrap();
        for k in 0..=1 {
            for basis in [CondBasis::Orthonormal, CondBasis::Legendre] {
                let c: Vec<f64> = weights
                    .iter()
                    .map(|&(s1, s2)| {
                        let ops = assemble_operators(
                            &mesh,
                            BasisSpec::new(k),
                            FluxWeights::new(s1, s2).unwrap(),
                        );
                        condition_of_system(&ops, &a, 100, basis, CondOptions::default())
                            .unwrap()
                            .cond2
                    })
                    .collect();
                assert!(
                    c.windows(2).all(|w| w[1] < w[0]),
                    "α={alpha} k={k} {basis:?}: {c:?}"
                );
            }
        }
    }
}

#[test]
fn piecewise_constant_value_is_closed_form() {
    // Q0 with σ = (1, 0): F = (a h²/4) I + K where K has eigenvalues
    // sin²(πm/N) + sin²(πl/N), so cond = 1 + 8 / (a h²) for even N
    let n = 12;
    let mesh = Arc::new(SpatialMesh::uniform(n, n, Rect::unit_square()).unwrap());
    let tm = GradedTimeMesh::new(100, 2.0, 0.1).unwrap();
    let a = L1Kernel::new(&tm, 0.7).unwrap();
    let ops = assemble_operators(
        &mesh,
        BasisSpec::new(0),
        FluxWeights::new(1.0, 0.0).unwrap(),
    );
    let c = condition_of_system(
        &ops,
        &a,
        100,
        CondBasis::Orthonormal,
        CondOptions::default(),
    )
    .unwrap();
    let h = 1.0 / n as f64;
    let expected = 1.0 + 8.0 / (a.a(100, 0) * h * h);
    assert!(
        (c.cond2 - expected).abs() < 1e-6 * expected,
        "{} vs {expected}",
        c.cond2
    );
}
