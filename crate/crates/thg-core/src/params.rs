use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every coefficient of the coupled system: the time weight sigma of the
/// second component, the linear coefficient mu, the standing-wave frequency
/// omega and the space dimension n.
///
/// The stationary system carries the derived coefficients omega + 1 (first
/// component) and kappa = mu + 3 sigma omega (second component). omega is
/// admissible when omega > max(-1, -mu/(3 sigma)), i.e. when both derived
/// coefficients are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub sigma: f64,
    pub mu: f64,
    pub omega: f64,
    pub n: usize,
    admissible: bool,
}

impl PhysParams {
    pub fn new(n: usize, sigma: f64, mu: f64, omega: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::DimensionOutOfRange(n));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::NonPositiveParam {
                name: "sigma",
                value: sigma,
            });
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::NonPositiveParam {
                name: "mu",
                value: mu,
            });
        }
        if !omega.is_finite() {
            return Err(Error::NonPositiveParam {
                name: "omega",
                value: omega,
            });
        }
        let admissible = omega > (-1.0f64).max(-mu / (3.0 * sigma));
        Ok(PhysParams {
            sigma,
            mu,
            omega,
            n,
            admissible,
        })
    }

    pub fn admissible(&self) -> bool {
        self.admissible
    }

    /// Bound below which omega is inadmissible.
    pub fn omega_bound(&self) -> f64 {
        (-1.0f64).max(-self.mu / (3.0 * self.sigma))
    }

    pub fn require_admissible(&self) -> Result<()> {
        if self.admissible {
            Ok(())
        } else {
            Err(Error::InadmissibleOmega {
                omega: self.omega,
                bound: self.omega_bound(),
            })
        }
    }

    /// kappa = mu + 3 sigma omega, the linear coefficient of the second
    /// stationary equation.
    pub fn kappa(&self) -> f64 {
        self.mu + 3.0 * self.sigma * self.omega
    }

    /// True at the resonance mu = 3 sigma (up to rounding).
    pub fn at_resonance(&self) -> bool {
        (self.mu - 3.0 * self.sigma).abs() <= 1e-12 * self.mu.max(1.0)
    }

    /// True when omega + 1 = mu + 3 sigma omega, the regime where ground
    /// states are exactly semitrivial.
    pub fn equal_coefficients(&self) -> bool {
        (self.omega + 1.0 - self.kappa()).abs() <= 1e-12 * self.kappa().abs().max(1.0)
    }
}
