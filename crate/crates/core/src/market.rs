//! Black-Scholes market primitives.
//!
//! The market has one risk-free asset growing at rate `r` and one stock with
//! volatility `sigma` whose drift is uncertain. `mu0` is the reference drift
//! estimate; a candidate drift `mu` is summarized by its risk adjustment
//! `nu_mu = (mu0 - mu) / sigma`, and `nu = (mu0 - r) / sigma` is the market
//! price of risk under the reference drift. Measure changes between the
//! reference measure, the risk-neutral measure, and a candidate-drift measure
//! are all exponential Girsanov tilts of the driving Brownian motion.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Market and investor parameters: reference drift `mu0`, risk-free rate `r`,
/// volatility `sigma`, horizon `horizon`, initial wealth `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    pub mu0: f64,
    pub r: f64,
    pub sigma: f64,
    pub horizon: f64,
    pub x0: f64,
}

impl MarketParams {
    pub fn new(mu0: f64, r: f64, sigma: f64, horizon: f64, x0: f64) -> Result<Self> {
        let mp = MarketParams { mu0, r, sigma, horizon, x0 };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.mu0, self.r, self.sigma, self.horizon, self.x0]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter("market parameters must be finite".into()));
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if self.horizon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if self.x0 <= 0.0 {
            return Err(Error::InvalidParameter(format!("x0 must be > 0, got {}", self.x0)));
        }
        Ok(())
    }

    /// Market price of risk under the reference drift, (mu0 - r) / sigma.
    pub fn market_price_of_risk(&self) -> f64 {
        (self.mu0 - self.r) / self.sigma
    }

    /// Risk adjustment of a candidate drift, (mu0 - mu) / sigma.
    /// Affine in `mu` and zero at the reference drift.
    pub fn nu_of_mu(&self, mu: f64) -> f64 {
        (self.mu0 - mu) / self.sigma
    }

    /// Risk-free growth factor over the full horizon, e^{r T}.
    pub fn growth_factor(&self) -> f64 {
        (self.r * self.horizon).exp()
    }

    /// Same market with a different initial wealth.
    pub fn with_x0(&self, x0: f64) -> Result<Self> {
        MarketParams::new(self.mu0, self.r, self.sigma, self.horizon, x0)
    }
}

/// Girsanov density exp(-theta w - theta^2 t / 2) of an exponential tilt with
/// kernel `theta`, evaluated at Brownian level `w` and time `t`.
///
/// With theta = nu this is the risk-neutral density against the reference
/// measure; with theta = nu_mu it is the candidate-drift density. Its
/// expectation over w ~ N(0, t) is 1 for every theta.
pub fn girsanov_density(theta: f64, w: f64, t: f64) -> f64 {
    (-theta * w - 0.5 * theta * theta * t).exp()
}
