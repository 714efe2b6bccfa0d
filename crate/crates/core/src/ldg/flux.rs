use crate::error::{invalid, Result};

/// Weights of the generalized alternating fluxes.
///
/// On an edge normal to x, `û = σ₁ u⁻ + (1 - σ₁) u⁺` and the flux of `p` uses
/// the complementary weight `1 - σ₁`; likewise with `σ₂` across y.
/// `−` is the limit from smaller coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxWeights {
    pub sigma1: f64,
    pub sigma2: f64,
}

impl FluxWeights {
    pub fn new(sigma1: f64, sigma2: f64) -> Result<Self> {
        if !sigma1.is_finite() || !sigma2.is_finite() {
            return invalid("flux weights must be finite");
        }
        Ok(Self { sigma1, sigma2 })
    }

    /// Central fluxes lose an order of accuracy for odd degrees.
    pub fn is_central(&self) -> bool {
        self.sigma1 == 0.5 || self.sigma2 == 0.5
    }

    /// Weights used for the flux of the auxiliary variable.
    pub fn complement(&self) -> Self {
        Self {
            sigma1: 1.0 - self.sigma1,
            sigma2: 1.0 - self.sigma2,
        }
    }
}

/// `σ v⁻ + (1 - σ) v⁺`
#[inline]
pub fn weighted_average(v_minus: f64, v_plus: f64, sigma: f64) -> f64 {
    sigma * v_minus + (1.0 - sigma) * v_plus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averages() {
        assert_eq!(weighted_average(1.5, -2.0, 1.0), 1.5);
        assert_eq!(weighted_average(1.5, -2.0, 0.0), -2.0);
        assert_eq!(weighted_average(2.0, 4.0, 0.25), 3.5);
    }

    #[test]
    fn central_flag() {
        assert!(FluxWeights::new(0.5, 0.5).unwrap().is_central());
        assert!(!FluxWeights::new(1.0, 0.0).unwrap().is_central());
        assert_eq!(
            FluxWeights::new(0.7, 0.2).unwrap().complement(),
            FluxWeights {
                sigma1: 0.30000000000000004,
                sigma2: 0.8
            }
        );
        assert!(FluxWeights::new(f64::NAN, 0.0).is_err());
    }
}
