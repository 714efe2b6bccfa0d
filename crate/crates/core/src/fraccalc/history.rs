use rayon::prelude::*;

use crate::basis::{DgField, VolumeQuad};
use crate::error::{invalid, Result};

use super::l1::L1Kernel;

/// Known part of the discrete substantial derivative at level `n`,
/// evaluated pointwise:
///
/// ```text
///   -A_{n-1}^n e^{-κ t_n} u^0 + Σ_{i=1}^{n-1} (A_i^n - A_{i-1}^n) e^{-κ (t_n - t_{n-i})} u^{n-i}
/// ```
///
/// The full discrete derivative is `A_0^n u^n` plus this value.
///
/// `history[l]` holds the values of `u^l` at the same points as `kappa`;
/// `points_per_cell` only sets the granularity of the parallel split.
pub fn substantial_history(
    a: &L1Kernel,
    kappa: &[f64],
    history: &[Vec<f64>],
    n: usize,
    points_per_cell: usize,
) -> Result<Vec<f64>> {
    if n == 0 || n > a.steps() {
        return invalid(format!("history level {n} outside 1..={}", a.steps()));
    }
    if history.len() != n {
        return invalid(format!(
            "level {n} needs {n} history entries, got {}",
            history.len()
        ));
    }
    if let Some(h) = history.iter().find(|h| h.len() != kappa.len()) {
        return invalid(format!(
            "history entry has {} points, expected {}",
            h.len(),
            kappa.len()
        ));
    }
    let tn = a.t(n);
    let row = a.row(n);
    // lag weights w_i = A_i^n - A_{i-1}^n (i >= 1) and -A_{n-1}^n for u^0
    let lags: Vec<(usize, f64, f64)> = (1..n)
        .map(|i| (n - i, row[i] - row[i - 1], tn - a.t(n - i)))
        .chain(std::iter::once((0, -row[n - 1], tn)))
        .collect();
    let chunk = points_per_cell.max(1);
    let mut out = vec![0.0; kappa.len()];
    out.par_chunks_mut(chunk).enumerate().for_each(|(c, o)| {
        let base = c * chunk;
        for (q, oq) in o.iter_mut().enumerate() {
            let p = base + q;
            let k = kappa[p];
            *oq = lags
                .iter()
                .map(|&(l, w, dt)| w * (-k * dt).exp() * history[l][p])
                .sum();
        }
    });
    Ok(out)
}

/// [`substantial_history`] for stored coefficient fields, evaluated at the
/// volume quadrature points of `vq`.
pub fn substantial_history_fields(
    a: &L1Kernel,
    vq: &VolumeQuad,
    kappa: &[f64],
    history: &[DgField],
    n: usize,
) -> Result<Vec<f64>> {
    let values: Vec<Vec<f64>> = history.iter().map(|f| vq.eval_field(f)).collect();
    substantial_history(a, kappa, &values, n, vq.points_per_cell())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::gamma;
    use crate::mesh::GradedTimeMesh;

    fn kernel(m: usize, g: f64, t: f64, alpha: f64) -> L1Kernel {
        L1Kernel::new(&GradedTimeMesh::new(m, g, t).unwrap(), alpha).unwrap()
    }

    #[test]
    fn zero_initial_data() {
        let a = kernel(5, 2.0, 1.0, 0.4);
        let h = substantial_history(&a, &[0.3; 7], &[vec![0.0; 7]], 1, 1).unwrap();
        assert!(h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constants_are_annihilated_without_kappa() {
        let a = kernel(5, 2.0, 1.0, 0.4);
        let c = 2.5;
        let h = substantial_history(&a, &[0.0; 4], &[vec![c; 4], vec![c; 4]], 2, 2).unwrap();
        for v in h {
            assert!((v + a.a(2, 0) * c).abs() < 1e-12);
            assert!((a.a(2, 0) * c + v).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_kappa_spot_check() {
        let a = kernel(6, 2.0, 0.1, 0.7);
        let n = 4;
        let kappa = -2.0;
        let u: Vec<f64> = (0..n).map(|l| 1.0 + 0.3 * l as f64).collect();
        let hist: Vec<Vec<f64>> = u.iter().map(|&v| vec![v]).collect();
        let got = substantial_history(&a, &[kappa], &hist, n, 1).unwrap()[0];
        let tn = a.t(n);
        let mut want = -a.a(n, n - 1) * (2.0 * tn).exp() * u[0];
        for i in 1..n {
            want += (a.a(n, i) - a.a(n, i - 1)) * (2.0 * (tn - a.t(n - i))).exp() * u[n - i];
        }
        assert!((got - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn exact_on_substantial_constants_and_linears() {
        let a = kernel(25, 3.0, 0.8, 0.6);
        let kappa: Vec<f64> = (0..9).map(|q| (q as f64 * 0.7).cos() * 1.5).collect();
        for n in 1..=25 {
            // u^l = c e^{-κ t_l}
            let hist: Vec<Vec<f64>> = (0..n)
                .map(|l| kappa.iter().map(|k| 1.7 * (-k * a.t(l)).exp()).collect())
                .collect();
            let h = substantial_history(&a, &kappa, &hist, n, 3).unwrap();
            for (q, k) in kappa.iter().enumerate() {
                let un = 1.7 * (-k * a.t(n)).exp();
                assert!((a.a(n, 0) * un + h[q]).abs() < 1e-10);
            }
            // u^l = t_l e^{-κ t_l}
            let hist: Vec<Vec<f64>> = (0..n)
                .map(|l| kappa.iter().map(|k| a.t(l) * (-k * a.t(l)).exp()).collect())
                .collect();
            let h = substantial_history(&a, &kappa, &hist, n, 3).unwrap();
            for (q, k) in kappa.iter().enumerate() {
                let tn = a.t(n);
                let un = tn * (-k * tn).exp();
                let exact = (-k * tn).exp() * tn.powf(0.4) / gamma(1.4);
                assert!((a.a(n, 0) * un + h[q] - exact).abs() < 1e-8 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn mismatched_history() {
        let a = kernel(5, 1.0, 1.0, 0.5);
        assert!(substantial_history(&a, &[0.0], &[vec![0.0]], 2, 1).is_err());
        assert!(substantial_history(&a, &[0.0], &[], 0, 1).is_err());
        assert!(substantial_history(&a, &[0.0, 1.0], &[vec![0.0]], 1, 1).is_err());
    }
}
