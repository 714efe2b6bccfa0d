use crate::error::{Error, Result};
use crate::fraccalc::L1Kernel;
use crate::ldg::LdgOperators;
use crate::sparse::{CsrMatrix, SparseLu};

/// Stopping rule for the iterative norm estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondOptions {
    pub max_iter: usize,
    /// Relative change of the estimate below which iteration stops.
    pub tol: f64,
}

impl Default for CondOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-10,
        }
    }
}

/// 2-norm and 1-norm condition estimates of one matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionEstimate {
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// `σ_max / σ_min`
    pub cond2: f64,
    /// `‖F‖₁ ‖F⁻¹‖₁` with `‖F⁻¹‖₁` from Hager's estimator.
    pub cond1: f64,
    pub iterations: usize,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    v.iter_mut().for_each(|x| *x /= n);
    n
}

fn start_vector(n: usize) -> Vec<f64> {
    // deterministic, not aligned with any lattice mode
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
        .collect();
    normalize(&mut v);
    v
}

/// Power iteration on `FᵀF` and on `(FᵀF)⁻¹` through the LU factors.
pub fn estimate_condition(f: &CsrMatrix, opts: CondOptions) -> Result<ConditionEstimate> {
    let n = f.nrows();
    if n == 0 || n != f.ncols() {
        return Err(Error::InvalidArgument(
            "condition number needs a nonempty square matrix".into(),
        ));
    }
    let mut lu = SparseLu::analyze(&f.with_full_diagonal())?;
    lu.refactor(&f.with_full_diagonal())
        .map_err(|e| Error::NumericFailure(format!("matrix is singular: {e}")))?;

    let mut iterations = 0;
    let mut v = start_vector(n);
    let mut sigma_max = 0.0;
    for it in 0..opts.max_iter {
        let mut w = f.matvec_transpose(&f.matvec(&v));
        let lam = normalize(&mut w);
        let s = lam.sqrt();
        v = w;
        iterations = iterations.max(it + 1);
        let done = it > 0 && (s - sigma_max).abs() <= opts.tol * s;
        sigma_max = s;
        if done {
            break;
        }
    }

    let mut v = start_vector(n);
    let mut inv_max: f64 = 0.0;
    for it in 0..opts.max_iter {
        // (FᵀF)⁻¹ v = F⁻¹ F⁻ᵀ v
        let mut w = v.clone();
        lu.solve_transpose_in_place(&mut w);
        lu.solve_in_place(&mut w);
        let lam = normalize(&mut w);
        if !lam.is_finite() {
            return Err(Error::NumericFailure(
                "matrix is numerically singular".into(),
            ));
        }
        let s = lam.sqrt();
        v = w;
        iterations = iterations.max(it + 1);
        let done = it > 0 && (s - inv_max).abs() <= opts.tol * s;
        inv_max = s;
        if done {
            break;
        }
    }
    let sigma_min = 1.0 / inv_max;
    let cond1 = f.norm1() * hager_inverse_norm1(&lu, n);
    Ok(ConditionEstimate {
        sigma_max,
        sigma_min,
        cond2: sigma_max / sigma_min,
        cond1,
        iterations,
    })
}

/// Hager's estimate of `‖F⁻¹‖₁`.
fn hager_inverse_norm1(lu: &SparseLu, n: usize) -> f64 {
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for _ in 0..5 {
        let mut y = x.clone();
        lu.solve_in_place(&mut y);
        let new_est: f64 = y.iter().map(|v| v.abs()).sum();
        let mut z: Vec<f64> = y
            .iter()
            .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        lu.solve_transpose_in_place(&mut z);
        let (jmax, zmax) = z.iter().enumerate().fold((0, 0.0f64), |acc, (j, v)| {
            if v.abs() > acc.1 {
                (j, v.abs())
            } else {
                acc
            }
        });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if new_est <= est || zmax <= ztx {
            est = est.max(new_est);
            break;
        }
        est = new_est;
        x = vec![0.0; n];
        x[jmax] = 1.0;
    }
    est
}

/// Normalization of the basis in which `F_M` is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CondBasis {
    /// The solver's orthonormal Legendre basis.
    #[default]
    Orthonormal,
    /// Unscaled Legendre polynomials `P_r(ξ) P_s(η)` on each cell.
    Legendre,
}

/// Rewrites a matrix from orthonormal to unscaled Legendre coordinates,
/// `D F D` with `D = diag(1/sqrt((2r+1)(2s+1)))` up to a constant.
pub fn legendre_rescale(f: &CsrMatrix, k: usize) -> CsrMatrix {
    let n1 = k + 1;
    let d: Vec<f64> = (0..f.nrows())
        .map(|i| {
            let (r, s) = ((i / n1) % n1, i % n1);
            1.0 / (((2 * r + 1) * (2 * s + 1)) as f64).sqrt()
        })
        .collect();
    f.scale_rows(&d).transpose().scale_rows(&d).transpose()
}

/// Condition estimates of `F_M` in the requested basis.
pub fn condition_of_system(
    ops: &LdgOperators,
    a: &L1Kernel,
    m: usize,
    basis: CondBasis,
    opts: CondOptions,
) -> Result<ConditionEstimate> {
    let f = system_at(ops, a, m)?;
    let f = match basis {
        CondBasis::Orthonormal => f,
        CondBasis::Legendre => legendre_rescale(&f, ops.basis.degree),
    };
    estimate_condition(&f, opts)
}

/// 2-norm condition number of `F_M = A_0^M M + K`.
pub fn condition_number(ops: &LdgOperators, a: &L1Kernel, m: usize) -> Result<f64> {
    condition_number_2(ops, a, m, CondOptions::default())
}

pub fn condition_number_2(
    ops: &LdgOperators,
    a: &L1Kernel,
    m: usize,
    opts: CondOptions,
) -> Result<f64> {
    Ok(estimate_condition(&system_at(ops, a, m)?, opts)?.cond2)
}

pub fn condition_number_1(ops: &LdgOperators, a: &L1Kernel, m: usize) -> Result<f64> {
    Ok(estimate_condition(&system_at(ops, a, m)?, CondOptions::default())?.cond1)
}

fn system_at(ops: &LdgOperators, a: &L1Kernel, m: usize) -> Result<CsrMatrix> {
    if m == 0 || m > a.steps() {
        return Err(Error::InvalidArgument(format!(
            "level {m} outside 1..={}",
            a.steps()
        )));
    }
    Ok(ops.system_matrix(a.a(m, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        let e = estimate_condition(&CsrMatrix::identity(5), CondOptions::default()).unwrap();
        assert!((e.cond2 - 1.0).abs() < 1e-12);
        assert!((e.cond1 - 1.0).abs() < 1e-12);
        let e = estimate_condition(
            &CsrMatrix::from_diagonal(&[1.0, 10.0]),
            CondOptions::default(),
        )
        .unwrap();
        assert!((e.cond2 - 10.0).abs() < 1e-9);
        assert!((e.cond1 - 10.0).abs() < 1e-12);
    }

    #[test]
    fn singular_is_reported() {
        let m =
            CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert!(estimate_condition(&m, CondOptions::default()).is_err());
    }
}
