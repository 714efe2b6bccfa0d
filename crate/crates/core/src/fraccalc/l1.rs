use crate::error::{invalid, Result};
use crate::mesh::GradedTimeMesh;

use super::gamma::gamma;

/// Coefficients `A_i^n` of the L1 discretization of the Caputo derivative.
///
/// The discrete derivative of a sequence `v` at level `n` is
/// `Σ_{i=1}^{n} A_{i-1}^n (v^{n-i+1} - v^{n-i})`.
#[derive(Debug, Clone)]
pub struct L1Kernel {
    alpha: f64,
    t: Vec<f64>,
    /// `a[n - 1][i] = A_i^n`
    a: Vec<Vec<f64>>,
}

impl L1Kernel {
    pub fn new(tm: &GradedTimeMesh, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("fractional order must lie in (0, 1), got {alpha}"));
        }
        let t = tm.points().to_vec();
        let m = tm.steps();
        let beta = 1.0 - alpha;
        let g = gamma(2.0 - alpha);
        let mut a = Vec::with_capacity(m);
        for n in 1..=m {
            let mut row: Vec<f64> = (1..=n)
                .map(|i| {
                    let tau = t[n - i + 1] - t[n - i];
                    let b = t[n] - t[n - i + 1];
                    // (b + τ)^β - b^β without cancellation
                    let diff = if b == 0.0 {
                        tau.powf(beta)
                    } else {
                        b.powf(beta) * (beta * (tau / b).ln_1p()).exp_m1()
                    };
                    diff / (g * tau)
                })
                .collect();
            // when τ/b is near machine epsilon neighbours agree to the last
            // bit and may round out of order; clamp those ties
            for i in 1..n {
                if row[i] > row[i - 1] {
                    debug_assert!(
                        row[i] - row[i - 1] <= 1e-14 * row[i - 1],
                        "L1 chain inversion beyond rounding"
                    );
                    row[i] = row[i - 1];
                }
            }
            debug_assert!(
                row.windows(2).all(|w| w[0] >= w[1]) && row.iter().all(|&v| v > 0.0),
                "L1 coefficients must form a positive nonincreasing chain"
            );
            a.push(row);
        }
        Ok(Self { alpha, t, a })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn steps(&self) -> usize {
        self.a.len()
    }

    pub fn t(&self, n: usize) -> f64 {
        self.t[n]
    }

    /// `A_i^n` for `1 <= n <= M`, `0 <= i < n`.
    #[inline]
    pub fn a(&self, n: usize, i: usize) -> f64 {
        self.a[n - 1][i]
    }

    /// `A_0^n, ..., A_{n-1}^n`
    pub fn row(&self, n: usize) -> &[f64] {
        &self.a[n - 1]
    }

    /// Applies the discrete Caputo derivative at level `n` to scalars `v[0..=n]`.
    pub fn caputo(&self, n: usize, v: &[f64]) -> f64 {
        (1..=n)
            .map(|i| self.a(n, i - 1) * (v[n - i + 1] - v[n - i]))
            .sum()
    }
}

/// Complementary discrete convolution kernel `P_{n-j}^n`.
#[derive(Debug, Clone)]
pub struct ConvKernel {
    /// `p[n - 1][k] = P_k^n`
    p: Vec<Vec<f64>>,
}

impl ConvKernel {
    pub fn new(a: &L1Kernel) -> Self {
        let m = a.steps();
        let mut p = Vec::with_capacity(m);
        for n in 1..=m {
            let mut row = vec![0.0; n];
            row[0] = 1.0 / a.a(n, 0);
            for j in (1..n).rev() {
                let s: f64 = (j + 1..=n)
                    .map(|i| (a.a(i, i - j - 1) - a.a(i, i - j)) * row[n - i])
                    .sum();
                row[n - j] = s / a.a(j, 0);
            }
            p.push(row);
        }
        Self { p }
    }

    pub fn steps(&self) -> usize {
        self.p.len()
    }

    /// `P_k^n` for `1 <= n <= M`, `0 <= k < n`.
    #[inline]
    pub fn p(&self, n: usize, k: usize) -> f64 {
        self.p[n - 1][k]
    }
}
