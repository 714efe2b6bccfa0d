//! Concrete test problems with known exact solutions.

use std::cell::Cell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::fraccalc::{gamma, mittag_leffler};
use crate::mesh::Rect;

pub type SpaceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// One instance of `e^{-κt} ∂_t^α(e^{κt} u) = Δu + f` on a periodic rectangle.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub alpha: f64,
    /// Regularity parameter, when the exact solution behaves like `t^δ`.
    pub delta: Option<f64>,
    pub domain: Rect,
    pub final_time: f64,
    pub kappa: SpaceFn,
    /// Certified bound `|κ(x)| <= C_κ`.
    pub c_kappa: f64,
    pub u0: SpaceFn,
    /// Source `f(t, x, y)`; `None` means homogeneous.
    pub source: Option<SpaceTimeFn>,
    /// Exact solution `u(t, x, y)`.
    pub exact: Option<SpaceTimeFn>,
    /// Set when κ is the same constant everywhere.
    pub kappa_const: Option<f64>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("delta", &self.delta)
            .field("domain", &self.domain)
            .field("final_time", &self.final_time)
            .field("c_kappa", &self.c_kappa)
            .field("has_source", &self.source.is_some())
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn kappa_at(&self, x: f64, y: f64) -> f64 {
        (self.kappa)(x, y)
    }

    pub fn exact_at(&self, t: f64, x: f64, y: f64) -> Option<f64> {
        self.exact.as_ref().map(|u| u(t, x, y))
    }

    /// Returns a copy with a different final time.
    pub fn with_final_time(mut self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return invalid(format!("final time must be positive, got {t}"));
        }
        self.final_time = t;
        Ok(self)
    }

    /// Bounds `C_min <= e^{-κ(x)t} <= C_max` over the domain and `[0, T]`,
    /// from the certified `C_κ`.
    pub fn exp_bounds(&self) -> (f64, f64) {
        let e = self.c_kappa * self.final_time;
        ((-e).exp(), e.exp())
    }

    /// Maximum of `|κ|` on a uniform `n x n` sample grid.
    pub fn sampled_kappa_max(&self, n: usize) -> f64 {
        let d = self.domain;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = d.x_lo + d.width() * (i as f64 + 0.5) / n as f64;
                let y = d.y_lo + d.height() * (j as f64 + 0.5) / n as f64;
                m = m.max(self.kappa_at(x, y).abs());
            }
        }
        m
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        invalid(format!("alpha must lie in (0, 1), got {alpha}"))
    }
}

/// Homogeneous problem with `κ ≡ -2` and `u₀ = sin(2πy) cos(2πx)`; the exact
/// solution is `e^{2t} E_α(-8π² t^α) cos(2πx) sin(2πy)`.
pub fn example1(alpha: f64) -> Result<ProblemSpec> {
    check_alpha(alpha)?;
    let lambda = 8.0 * PI * PI;
    let exact: SpaceTimeFn = Arc::new(move |t: f64, x: f64, y: f64| {
        let amp = cached_amplitude(alpha, t, || {
            (2.0 * t).exp()
                * mittag_leffler(alpha, -lambda * t.powf(alpha)).expect("Mittag-Leffler evaluation")
        });
        amp * (2.0 * PI * x).cos() * (2.0 * PI * y).sin()
    });
    Ok(ProblemSpec {
        name: "example1".into(),
        alpha,
        delta: None,
        domain: Rect::unit_square(),
        final_time: 0.1,
        kappa: Arc::new(|_, _| -2.0),
        c_kappa: 2.0,
        u0: Arc::new(|x, y| (2.0 * PI * y).sin() * (2.0 * PI * x).cos()),
        source: None,
        exact: Some(exact),
        kappa_const: Some(-2.0),
    })
}

thread_local! {
    static AMPLITUDE: Cell<(u64, u64, f64)> = const { Cell::new((u64::MAX, u64::MAX, 0.0)) };
}

/// Exact solutions are evaluated point by point at a fixed time, so the
/// time factor is memoized per thread.
fn cached_amplitude(alpha: f64, t: f64, compute: impl FnOnce() -> f64) -> f64 {
    let key = (alpha.to_bits(), t.to_bits());
    AMPLITUDE.with(|c| {
        let (a, b, v) = c.get();
        if (a, b) == key {
            v
        } else {
            let v = compute();
            c.set((key.0, key.1, v));
            v
        }
    })
}

/// Amplitude `e^{2t} E_α(-8π² t^α)` of the first example's exact solution.
pub fn example1_amplitude(alpha: f64, t: f64) -> Result<f64> {
    Ok((2.0 * t).exp() * mittag_leffler(alpha, -8.0 * PI * PI * t.powf(alpha))?)
}

/// Which form of the second example's source to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceVariant {
    /// Source consistent with the exact solution.
    #[default]
    Consistent,
    /// Source with the sign of the `t cos(2πx)` factor in front of the
    /// `sin²` term flipped, as it is sometimes quoted.
    FlippedSign,
}

/// Inhomogeneous problem with `κ(x) = cos(2πx)`, `u₀ ≡ 0` and exact solution
/// `e^{-t cos(2πx)} t^δ cos(2πx) sin(2πy)` on `(0, 0.1]`.
pub fn example2(alpha: f64, delta: f64) -> Result<ProblemSpec> {
    example2_with(alpha, delta, SourceVariant::Consistent)
}

pub fn example2_with(alpha: f64, delta: f64, variant: SourceVariant) -> Result<ProblemSpec> {
    check_alpha(alpha)?;
    if !(delta > 0.0 && delta < 2.0 && delta != 1.0) {
        return invalid(format!("delta must lie in (0, 1) or (1, 2), got {delta}"));
    }
    let lead = gamma(1.0 + delta) / gamma(delta + 1.0 - alpha);
    let sign = match variant {
        SourceVariant::Consistent => -1.0,
        SourceVariant::FlippedSign => 1.0,
    };
    let source: SpaceTimeFn = Arc::new(move |t: f64, x: f64, y: f64| {
        let c = (2.0 * PI * x).cos();
        let s = (2.0 * PI * x).sin();
        let sy = (2.0 * PI * y).sin();
        let e = (-t * c).exp();
        let td = t.powf(delta);
        let g = 4.0 * PI * PI * td * e * c * sy;
        let h = 4.0 * PI * PI * td * t * e * s * s * sy;
        e * lead * t.powf(delta - alpha) * c * sy + (2.0 - t * c) * g + (2.0 + sign * t * c) * h
    });
    let exact: SpaceTimeFn = Arc::new(move |t: f64, x: f64, y: f64| {
        let c = (2.0 * PI * x).cos();
        (-t * c).exp() * t.powf(delta) * c * (2.0 * PI * y).sin()
    });
    Ok(ProblemSpec {
        name: "example2".into(),
        alpha,
        delta: Some(delta),
        domain: Rect::unit_square(),
        final_time: 0.1,
        kappa: Arc::new(|x, _| (2.0 * PI * x).cos()),
        c_kappa: 1.0,
        u0: Arc::new(|_, _| 0.0),
        source: Some(source),
        exact: Some(exact),
        kappa_const: None,
    })
}

/// Problem with constant `κ`, user initial data and no source.
pub fn constant_kappa(alpha: f64, kappa: f64, u0: SpaceFn, final_time: f64) -> Result<ProblemSpec> {
    check_alpha(alpha)?;
    if !kappa.is_finite() {
        return invalid("kappa must be finite");
    }
    Ok(ProblemSpec {
        name: "constant-kappa".into(),
        alpha,
        delta: None,
        domain: Rect::unit_square(),
        final_time,
        kappa: Arc::new(move |_, _| kappa),
        c_kappa: kappa.abs(),
        u0,
        source: None,
        exact: None,
        kappa_const: Some(kappa),
    }
    .with_final_time(final_time)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_basics() {
        let p = example1(0.7).unwrap();
        for (x, y) in [(0.1, 0.2), (0.77, 0.4)] {
            assert!((p.exact_at(0.0, x, y).unwrap() - (p.u0)(x, y)).abs() < 1e-15);
        }
        for t in [0.0, 0.05, 0.1] {
            for y in [0.1, 0.6] {
                assert!(p.exact_at(t, 0.25, y).unwrap().abs() < 1e-15);
            }
        }
        let amp = 0.2f64.exp() * mittag_leffler(0.7, -8.0 * PI * PI * 0.1f64.powf(0.7)).unwrap();
        assert!((example1_amplitude(0.7, 0.1).unwrap() - amp).abs() < 1e-15);
        assert!(example1(1.0).is_err());
    }

    #[test]
    fn kappa_bounds() {
        let p1 = example1(0.5).unwrap();
        let p2 = example2(0.5, 0.5).unwrap();
        assert_eq!(p1.c_kappa, 2.0);
        assert_eq!(p2.c_kappa, 1.0);
        assert!(p1.sampled_kappa_max(100) <= p1.c_kappa);
        assert!(p2.sampled_kappa_max(100) <= p2.c_kappa);
        // the sampled maximum of |cos(2πx)| approaches 1
        assert!(p2.sampled_kappa_max(100) > 0.999);
        for p in [&p1, &p2] {
            let (lo, hi) = p.exp_bounds();
            for i in 0..=20 {
                let t = p.final_time * i as f64 / 20.0;
                for j in 0..50 {
                    let x = j as f64 / 50.0;
                    let v = (-p.kappa_at(x, 0.3) * t).exp();
                    assert!(lo <= v && v <= hi);
                }
            }
        }
    }

    #[test]
    fn example2_validation() {
        assert!(example2(0.5, 1.0).is_err());
        assert!(example2(0.5, 0.0).is_err());
        assert!(example2(0.5, 2.0).is_err());
        assert!(example2(1.5, 0.5).is_err());
        let p = example2(0.3, 0.3).unwrap();
        assert_eq!(p.exact_at(0.0, 0.3, 0.4).unwrap(), 0.0);
        assert_eq!((p.u0)(0.3, 0.4), 0.0);
    }

    #[test]
    fn periodic_seams() {
        let probs = [example1(0.6).unwrap(), example2(0.6, 1.4).unwrap()];
        let d = 1e-6;
        for p in &probs {
            for t in [0.01, 0.07] {
                for s in [0.13, 0.5, 0.91] {
                    let e = p.exact.as_ref().unwrap();
                    let f = p.source.clone();
                    // values across x seam and y seam
                    assert!((e(t, 0.0, s) - e(t, 1.0, s)).abs() < 1e-12);
                    assert!((e(t, s, 0.0) - e(t, s, 1.0)).abs() < 1e-12);
                    assert!(((p.u0)(0.0, s) - (p.u0)(1.0, s)).abs() < 1e-12);
                    if let Some(f) = f {
                        assert!((f(t, 0.0, s) - f(t, 1.0, s)).abs() < 1e-12);
                        assert!((f(t, s, 0.0) - f(t, s, 1.0)).abs() < 1e-12);
                    }
                    // first derivatives by matching one-sided differences
                    let dx0 = (e(t, d, s) - e(t, 0.0, s)) / d;
                    let dx1 = (e(t, 1.0, s) - e(t, 1.0 - d, s)) / d;
                    assert!((dx0 - dx1).abs() < 1e-3);
                    let dy0 = (e(t, s, d) - e(t, s, 0.0)) / d;
                    let dy1 = (e(t, s, 1.0) - e(t, s, 1.0 - d)) / d;
                    assert!((dy0 - dy1).abs() < 1e-3);
                }
            }
        }
    }

    #[test]
    fn leading_caputo_term_is_constant_when_delta_equals_alpha() {
        let lead = gamma(1.3) / gamma(1.0);
        for t in [0.01f64, 0.05, 0.1] {
            assert!((lead * f64::powf(t, 0.3 - 0.3) - gamma(1.3)).abs() < 1e-15);
        }
    }

    #[test]
    fn amplitude_decreases() {
        for alpha in [0.3, 0.7] {
            let mut last = f64::INFINITY;
            for i in 1..=50 {
                let t = 0.1 * i as f64 / 50.0;
                let v = mittag_leffler(alpha, -8.0 * PI * PI * t.powf(alpha))
                    .unwrap()
                    .abs();
                assert!(v < last);
                last = v;
            }
        }
    }
}
