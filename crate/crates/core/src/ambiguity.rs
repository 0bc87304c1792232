//! Smooth ambiguity preferences.
//!
//! Ambiguity about the stock drift is modeled by a prior over candidate
//! drifts (the second-order distribution) together with an attitude function
//! `phi` applied to per-drift expected utilities. The criterion ranks a
//! terminal wealth X by the outer expectation of phi(E^mu[U(X)]) over the
//! prior. The power family used here is
//!
//!   phi(x) = x^gamma / gamma            on x > 0  (positive branch),
//!   phi(x) = -(-x)^gamma / gamma        on x < 0  (negative branch),
//!
//! with gamma < 1, and the gamma = 0 member is the logarithmic limit
//! phi(x) = ln x (resp. -ln(-x)). Smaller gamma means stronger aversion to
//! ambiguity; gamma -> 1 is ambiguity neutrality. The branch is chosen to
//! match the sign of the utility values it is composed with: utilities that
//! are positive (power utility with positive exponent) pair with the positive
//! branch, utilities that are negative (exponential utility) with the
//! negative branch.

use crate::error::{Error, Result};
use crate::market::MarketParams;
use serde::{Deserialize, Serialize};

/// Sign of the domain the attitude function acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhiBranch {
    Positive,
    Negative,
}

impl PhiBranch {
    fn name(self) -> &'static str {
        match self {
            PhiBranch::Positive => "positive",
            PhiBranch::Negative => "negative",
        }
    }
}

/// Power ambiguity attitude with exponent `gamma < 1`.
///
/// `gamma == 0` is accepted and evaluated as the logarithmic limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAmbiguity {
    gamma: f64,
    branch: PhiBranch,
}

impl PowerAmbiguity {
    pub fn new(gamma: f64, branch: PhiBranch) -> Result<Self> {
        if !gamma.is_finite() || gamma >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "ambiguity exponent gamma must be finite and < 1, got {gamma}"
            )));
        }
        Ok(PowerAmbiguity { gamma, branch })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn branch(&self) -> PhiBranch {
        self.branch
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let ok = match self.branch {
            PhiBranch::Positive => x > 0.0,
            PhiBranch::Negative => x < 0.0,
        };
        if ok && x.is_finite() {
            Ok(())
        } else {
            Err(Error::PhiDomain { arg: x, branch: self.branch.name() })
        }
    }

    /// phi(x). Strictly increasing on its branch domain.
    pub fn phi(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let g = self.gamma;
        Ok(match self.branch {
            PhiBranch::Positive => {
                if g == 0.0 {
                    x.ln()
                } else {
                    x.powf(g) / g
                }
            }
            PhiBranch::Negative => {
                if g == 0.0 {
                    -(-x).ln()
                } else {
                    -(-x).powf(g) / g
                }
            }
        })
    }

    /// phi'(x) = x^(gamma-1) on the positive branch, (-x)^(gamma-1) on the
    /// negative branch. Strictly positive on the domain.
    pub fn phi_prime(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match self.branch {
            PhiBranch::Positive => x.powf(self.gamma - 1.0),
            PhiBranch::Negative => (-x).powf(self.gamma - 1.0),
        })
    }

    /// Inverse of phi' as a map onto the branch domain; defined for y > 0.
    pub fn phi_prime_inv(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phi_prime_inv needs y > 0, got {y}"
            )));
        }
        let root = y.powf(1.0 / (self.gamma - 1.0));
        Ok(match self.branch {
            PhiBranch::Positive => root,
            PhiBranch::Negative => -root,
        })
    }

    /// Convex conjugate psi(y) = sup_{x>0} [phi(x) - x y] of the positive
    /// branch; for gamma != 0 this is ((1-gamma)/gamma) y^(gamma/(gamma-1)),
    /// and -ln y - 1 in the logarithmic limit. Only the positive branch has a
    /// finite conjugate.
    pub fn psi(&self, y: f64) -> Result<f64> {
        if self.branch != PhiBranch::Positive {
            return Err(Error::InvalidParameter(
                "conjugate is defined for the positive branch only".into(),
            ));
        }
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::InvalidParameter(format!("psi needs y > 0, got {y}")));
        }
        let g = self.gamma;
        if g == 0.0 {
            Ok(-y.ln() - 1.0)
        } else {
            Ok((1.0 - g) / g * y.powf(g / (g - 1.0)))
        }
    }
}

/// Gaussian prior over the drift, centered at the reference drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianDriftPrior {
    pub center: f64,
    pub sigma_mu: f64,
}

impl GaussianDriftPrior {
    pub fn new(center: f64, sigma_mu: f64) -> Result<Self> {
        if !center.is_finite() || !sigma_mu.is_finite() || sigma_mu < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Gaussian drift prior needs finite center and sigma_mu >= 0, got ({center}, {sigma_mu})"
            )));
        }
        Ok(GaussianDriftPrior { center, sigma_mu })
    }

    /// Precision parameter sigma0^2 = sigma^2 / (sigma_mu^2 T): the inverse
    /// variance, per unit horizon, of the drift's risk adjustment nu_mu.
    /// Large values mean little ambiguity. Degenerate priors (sigma_mu = 0)
    /// have no finite precision; callers should fall back to the
    /// no-ambiguity baseline.
    pub fn sigma0_sq(&self, mp: &MarketParams) -> Result<f64> {
        if self.sigma_mu == 0.0 {
            return Err(Error::NoAmbiguityLimit);
        }
        Ok(mp.sigma * mp.sigma / (self.sigma_mu * self.sigma_mu * mp.horizon))
    }

    /// Standard deviation of nu_mu under the prior, sigma_mu / sigma.
    pub fn nu_mu_std(&self, mp: &MarketParams) -> f64 {
        self.sigma_mu / mp.sigma
    }
}

/// One candidate drift with its prior probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedDrift {
    pub mu: f64,
    pub prob: f64,
}

/// Finitely supported prior over candidate drifts.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDriftPrior {
    points: Vec<WeightedDrift>,
}

impl DiscreteDriftPrior {
    pub fn new(points: Vec<WeightedDrift>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("discrete prior needs at least one point".into()));
        }
        for pt in &points {
            if !pt.mu.is_finite() || !pt.prob.is_finite() || pt.prob <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "discrete prior points need finite mu and prob > 0, got ({}, {})",
                    pt.mu, pt.prob
                )));
            }
        }
        let total: f64 = points.iter().map(|p| p.prob).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "discrete prior probabilities must sum to 1, got {total}"
            )));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i].mu == points[j].mu {
                    return Err(Error::InvalidParameter(format!(
                        "discrete prior drifts must be distinct, {} repeats",
                        points[i].mu
                    )));
                }
            }
        }
        Ok(DiscreteDriftPrior { points })
    }

    pub fn points(&self) -> &[WeightedDrift] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Nonnegative prior reweighting lambda with sum_i lambda_i p_i = 1. Weighted
/// expected-utility problems are indexed by these vectors; the normalization
/// keeps the reweighted prior a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorWeights {
    lambda: Vec<f64>,
}

impl PriorWeights {
    /// Validates an already normalized weight vector.
    pub fn new(lambda: Vec<f64>, prior: &DiscreteDriftPrior) -> Result<Self> {
        if lambda.len() != prior.len() {
            return Err(Error::InvalidParameter(format!(
                "weight vector length {} does not match prior size {}",
                lambda.len(),
                prior.len()
            )));
        }
        if lambda.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(Error::InvalidParameter("weights must be finite and >= 0".into()));
        }
        let total: f64 = lambda
            .iter()
            .zip(prior.points())
            .map(|(l, pt)| l * pt.prob)
            .sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "weights must satisfy sum lambda_i p_i = 1, got {total}"
            )));
        }
        Ok(PriorWeights { lambda })
    }

    /// Scales a raw nonnegative vector so that sum_i lambda_i p_i = 1.
    pub fn normalized(raw: &[f64], prior: &DiscreteDriftPrior) -> Result<Self> {
        if raw.len() != prior.len() {
            return Err(Error::InvalidParameter(format!(
                "weight vector length {} does not match prior size {}",
                raw.len(),
                prior.len()
            )));
        }
        if raw.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(Error::InvalidParameter("weights must be finite and >= 0".into()));
        }
        let total: f64 = raw.iter().zip(prior.points()).map(|(l, pt)| l * pt.prob).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("weights must have positive total mass".into()));
        }
        Ok(PriorWeights { lambda: raw.iter().map(|l| l / total).collect() })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }
}
