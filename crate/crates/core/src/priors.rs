//! Gaussian prior terms as negative log-likelihoods.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::wrap;

/// ln(sqrt(2 pi))
const HALF_LN_TAU: f64 = 0.918_938_533_204_672_8;

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )))
    }
}

/// `-ln N(x; mu, sigma^2)`. The `ln(sigma sqrt(2 pi))` constant is kept so
/// values are comparable across sigmas; it does not move the minimum.
pub fn nll_gaussian(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let r = (x - mu) / sigma;
    Ok(0.5 * r * r + sigma.ln() + HALF_LN_TAU)
}

/// d/dx of [`nll_gaussian`].
pub fn nll_gaussian_grad(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok((x - mu) / (sigma * sigma))
}

/// Wrapped difference `a - b` in (-pi, pi].
pub fn angle_residual(a: f64, b: f64) -> f64 {
    wrap(a - b)
}

/// One weighted Gaussian belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub mu: f64,
    pub sigma: f64,
    pub weight: f64,
}

impl GaussianTerm {
    pub fn new(mu: f64, sigma: f64, weight: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!(
                "weight must be in [0, 1], got {weight}"
            )));
        }
        Ok(Self { mu, sigma, weight })
    }

    /// Unweighted NLL at `x`.
    pub fn nll(&self, x: f64) -> f64 {
        let r = (x - self.mu) / self.sigma;
        0.5 * r * r + self.sigma.ln() + HALF_LN_TAU
    }

    /// Unweighted derivative at `x`.
    pub fn grad(&self, x: f64) -> f64 {
        (x - self.mu) / (self.sigma * self.sigma)
    }
}

/// Standard deviations and weights of the four prior terms:
/// turn (X1), step length (X2), distance to path (X3), heading hold (X4).
///
/// The step-length deviation grows with the observed step:
/// `sigma2 = sigma[1] + sigma2_rel * m_obs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorParams {
    #[serde(default = "PriorParams::default_sigma")]
    pub sigma: [f64; 4],
    #[serde(default = "PriorParams::default_sigma2_rel")]
    pub sigma2_rel: f64,
    #[serde(default = "PriorParams::default_weight")]
    pub weight: [f64; 4],
}

impl PriorParams {
    fn default_sigma() -> [f64; 4] {
        [0.05, 0.01, 1.0, 0.1]
    }

    fn default_sigma2_rel() -> f64 {
        0.1
    }

    fn default_weight() -> [f64; 4] {
        [1.0, 1.0, 0.8, 0.1]
    }

    pub fn validate(&self) -> Result<()> {
        for &s in &self.sigma {
            check_sigma(s)?;
        }
        if !(self.sigma2_rel >= 0.0 && self.sigma2_rel.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma2_rel must be non-negative, got {}",
                self.sigma2_rel
            )));
        }
        for &w in &self.weight {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidParameter(format!(
                    "weights must be in [0, 1], got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Step-length deviation for an observed step of `m_obs` meters.
    pub fn sigma_magnitude(&self, m_obs: f64) -> f64 {
        self.sigma[1] + self.sigma2_rel * m_obs
    }

    /// Copy with the given terms switched off (weight 0). Indices are 0-based.
    pub fn without(mut self, terms: &[usize]) -> Self {
        for &t in terms {
            self.weight[t] = 0.0;
        }
        self
    }
}

impl Default for PriorParams {
    fn default() -> Self {
        Self {
            sigma: Self::default_sigma(),
            sigma2_rel: Self::default_sigma2_rel(),
            weight: Self::default_weight(),
        }
    }
}

/// Largest possible angular residual.
pub const MAX_ANGLE_RESIDUAL: f64 = PI;
