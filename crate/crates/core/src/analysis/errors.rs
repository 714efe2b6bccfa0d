use rayon::prelude::*;

use crate::basis::{gauss_rule, DgField, VolumeQuad};
use crate::error::{invalid, Result};
use crate::ldg::Trajectory;

/// `‖field - g‖` by `(k + 3)`-point tensor quadrature.
pub fn l2_error(field: &DgField, g: impl Fn(f64, f64) -> f64) -> f64 {
    let basis = field.basis();
    let vq = VolumeQuad::new(field.mesh(), basis, basis.default_rule());
    let vals = vq.eval_field(field);
    vals.iter()
        .enumerate()
        .map(|(q, v)| vq.w[q] * (v - g(vq.x[q], vq.y[q])).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Space-time error `Σ_n ∫_{t_{n-1}}^{t_n} ‖(1-θ) e_{n-1} + θ e_n‖ dt` with
/// `e_l = u(t_l) - u_h^l`, the linear-in-time interpolants of the exact and
/// numerical solutions, using `quad_t` Gauss points per step.
pub fn error_e(
    traj: &Trajectory,
    exact: impl Fn(f64, f64, f64) -> f64 + Sync,
    quad_t: usize,
) -> Result<f64> {
    let basis = traj.fields[0].basis();
    error_e_with(traj, exact, quad_t, basis.default_quad_points())
}

/// [`error_e`] with an explicit spatial quadrature size.
pub fn error_e_with(
    traj: &Trajectory,
    exact: impl Fn(f64, f64, f64) -> f64 + Sync,
    quad_t: usize,
    quad_x: usize,
) -> Result<f64> {
    if quad_t < 2 {
        return invalid(format!(
            "need at least 2 time quadrature points, got {quad_t}"
        ));
    }
    let tm = &traj.time_mesh;
    if traj.fields.len() != tm.steps() + 1 {
        return invalid("trajectory length does not match its time mesh");
    }
    let first = &traj.fields[0];
    let vq = VolumeQuad::new(first.mesh(), first.basis(), gauss_rule(quad_x)?);
    let errs: Vec<Vec<f64>> = traj
        .fields
        .par_iter()
        .enumerate()
        .map(|(n, f)| {
            let t = tm.t(n);
            let vals = vq.eval_field(f);
            vals.iter()
                .enumerate()
                .map(|(q, v)| exact(t, vq.x[q], vq.y[q]) - v)
                .collect()
        })
        .collect();
    let inner = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .zip(&vq.w)
            .map(|((x, y), w)| w * x * y)
            .sum::<f64>()
    };
    let rule = gauss_rule(quad_t)?;
    let mut total = 0.0;
    for n in 1..=tm.steps() {
        let (e0, e1) = (&errs[n - 1], &errs[n]);
        let (aa, ab, bb) = (inner(e0, e0), inner(e0, e1), inner(e1, e1));
        let mut s = 0.0;
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let th = 0.5 * (xi + 1.0);
            let sq = (1.0 - th) * (1.0 - th) * aa + 2.0 * th * (1.0 - th) * ab + th * th * bb;
            s += 0.5 * w * sq.max(0.0).sqrt();
        }
        total += tm.tau(n) * s;
    }
    Ok(total)
}

/// `T · ‖u(T) - u_h^M‖`, the final-time error scaled by the horizon.
pub fn error_final(
    traj: &Trajectory,
    exact: impl Fn(f64, f64, f64) -> f64,
    quad_x: usize,
) -> Result<f64> {
    let tm = &traj.time_mesh;
    let last = traj.last();
    let vq = VolumeQuad::new(last.mesh(), last.basis(), gauss_rule(quad_x)?);
    let t = tm.final_time();
    let vals = vq.eval_field(last);
    let sq: f64 = vals
        .iter()
        .enumerate()
        .map(|(q, v)| vq.w[q] * (exact(t, vq.x[q], vq.y[q]) - v).powi(2))
        .sum();
    Ok(t * sq.sqrt())
}

/// Which scalar a convergence study reports per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMetric {
    /// [`error_e`]: time integral of the interpolated error.
    #[default]
    TimeIntegral,
    /// [`error_final`]: `T` times the error at the last level.
    FinalTime,
}

impl ErrorMetric {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorMetric::TimeIntegral => "time-integral",
            ErrorMetric::FinalTime => "final-time",
        }
    }

    pub fn evaluate(
        &self,
        traj: &Trajectory,
        exact: impl Fn(f64, f64, f64) -> f64 + Sync,
        quad_t: usize,
        quad_x: usize,
    ) -> Result<f64> {
        match self {
            ErrorMetric::TimeIntegral => error_e_with(traj, exact, quad_t, quad_x),
            ErrorMetric::FinalTime => error_final(traj, exact, quad_x),
        }
    }
}

/// Observed orders `log(E_i / E_{i+1}) / log(p_i / p_{i+1})`.
pub fn rates(errors: &[f64], params: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != params.len() || errors.len() < 2 {
        return invalid("rates need two or more matching errors and parameters");
    }
    if errors.iter().chain(params).any(|&v| !(v > 0.0)) {
        return invalid("rates need positive errors and parameters");
    }
    Ok(errors
        .windows(2)
        .zip(params.windows(2))
        .map(|(e, p)| (e[0] / e[1]).ln() / (p[0] / p[1]).ln())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_rates() {
        assert_eq!(rates(&[4.0, 1.0], &[2.0, 1.0]).unwrap(), vec![2.0]);
        assert_eq!(
            rates(&[3.0, 3.0, 3.0], &[1.0, 0.5, 0.25]).unwrap(),
            vec![0.0, 0.0]
        );
        assert!(rates(&[1.0, 0.0], &[1.0, 0.5]).is_err());
        assert!(rates(&[1.0], &[1.0]).is_err());
        // step-count studies pass 1/M to get positive orders
        let r = rates(&[1.0, 0.25], &[1.0 / 10.0, 1.0 / 20.0]).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-15);
    }
}
