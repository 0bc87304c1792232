//! Closed-form optimal portfolios under a Gaussian drift prior.
//!
//! For exponential, power, and shifted power utility the optimal terminal
//! wealth is an explicit transform of a quadratic in the reference-measure
//! Brownian level W_T. Writing
//!
//!   g(w) = (p / 2T) w^2 + q w + c,
//!
//! the optimum is g(w)/alpha for exponential utility, exp(g(w)/beta) for
//! power utility, and exp(g(w)/beta) - a for shifted power utility. The
//! coefficient p solves a quadratic whose coefficients involve the ambiguity
//! exponent gamma and the prior precision sigma0^2; q and c follow, with c
//! pinned down by the time-zero budget. The structs here carry (p, q, c)
//! and evaluate every derived quantity: per-drift expected utilities, the
//! wealth process and trading strategy in feedback form, the ambiguity
//! value, and first-order-condition diagnostics.

use crate::ambiguity::{GaussianDriftPrior, PhiBranch, PowerAmbiguity};
use crate::error::{Error, Result};
use crate::market::{girsanov_density, MarketParams};
use crate::numerics::{gauss_hermite, gaussian_exp_quadratic, gaussian_quadratic_mean};
use serde::{Deserialize, Serialize};

/// Relative tolerance for the node-doubling check in prior integrals.
const PRIOR_DOUBLING_TOL: f64 = 1e-8;

/// Utility families with closed-form solutions.
///
/// * `Cara`: U(x) = -exp(-alpha x) / alpha on all of R, alpha > 0.
/// * `Crra`: U(x) = x^beta / beta on x > 0, 0 < beta < 1.
/// * `Hara`: U(x) = (x + shift)^beta / beta on x > -shift.
///
/// In JSON the shift is spelled `a`, e.g.
/// `{"family": "hara", "beta": 0.333, "a": 0.2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilityFamily {
    Cara { alpha: f64 },
    Crra { beta: f64 },
    Hara {
        beta: f64,
        #[serde(rename = "a", alias = "shift")]
        shift: f64,
    },
}

impl UtilityFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            UtilityFamily::Cara { alpha } => {
                if !alpha.is_finite() || alpha <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "exponential utility needs alpha > 0, got {alpha}"
                    )));
                }
            }
            UtilityFamily::Crra { beta } => {
                if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "power utility needs 0 < beta < 1, got {beta}"
                    )));
                }
            }
            UtilityFamily::Hara { beta, shift } => {
                if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "shifted power utility needs 0 < beta < 1, got {beta}"
                    )));
                }
                if !shift.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "shifted power utility needs a finite shift, got {shift}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sign of the utility's range, which fixes the attitude branch it pairs
    /// with: exponential utility is negative-valued, the power families are
    /// positive-valued.
    pub fn phi_branch(&self) -> PhiBranch {
        match self {
            UtilityFamily::Cara { .. } => PhiBranch::Negative,
            UtilityFamily::Crra { .. } | UtilityFamily::Hara { .. } => PhiBranch::Positive,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UtilityFamily::Cara { .. } => "cara",
            UtilityFamily::Crra { .. } => "crra",
            UtilityFamily::Hara { .. } => "hara",
        }
    }

    /// U(x).
    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            UtilityFamily::Cara { alpha } => Ok(-(-alpha * x).exp() / alpha),
            UtilityFamily::Crra { beta } => {
                if x <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "power utility needs positive wealth, got {x}"
                    )));
                }
                Ok(x.powf(beta) / beta)
            }
            UtilityFamily::Hara { beta, shift } => {
                let y = x + shift;
                if y <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "shifted power utility needs wealth above {}, got {x}",
                        -shift
                    )));
                }
                Ok(y.powf(beta) / beta)
            }
        }
    }

    /// U'(x), strictly positive on the domain.
    pub fn marginal(&self, x: f64) -> Result<f64> {
        match *self {
            UtilityFamily::Cara { alpha } => Ok((-alpha * x).exp()),
            UtilityFamily::Crra { beta } => {
                if x <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "power utility needs positive wealth, got {x}"
                    )));
                }
                Ok(x.powf(beta - 1.0))
            }
            UtilityFamily::Hara { beta, shift } => {
                let y = x + shift;
                if y <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "shifted power utility needs wealth above {}, got {x}",
                        -shift
                    )));
                }
                Ok(y.powf(beta - 1.0))
            }
        }
    }

    /// I(y) = (U')^{-1}(y), defined for y > 0.
    pub fn inverse_marginal(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "inverse marginal utility needs y > 0, got {y}"
            )));
        }
        match *self {
            UtilityFamily::Cara { alpha } => Ok(-y.ln() / alpha),
            UtilityFamily::Crra { beta } => Ok(y.powf(1.0 / (beta - 1.0))),
            UtilityFamily::Hara { beta, shift } => Ok(y.powf(1.0 / (beta - 1.0)) - shift),
        }
    }
}

/// Optimal solution under a centered Gaussian drift prior, stored through
/// the payoff coefficients (p, q, c).
///
/// All evaluations are parameterized by the Brownian level w of the
/// reference measure (the measure under which the stock drift is the point
/// estimate), so w = 0 is "drift as estimated" and W_T ~ N(0, T) there.
#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    family: UtilityFamily,
    ambiguity: PowerAmbiguity,
    market: MarketParams,
    sigma_mu: f64,
    p: f64,
    q: f64,
    c: f64,
    warnings: Vec<String>,
}

impl ClosedFormSolution {
    pub fn family(&self) -> &UtilityFamily {
        &self.family
    }

    pub fn ambiguity(&self) -> &PowerAmbiguity {
        &self.ambiguity
    }

    pub fn market(&self) -> &MarketParams {
        &self.market
    }

    /// Standard deviation of the drift prior this solution was solved under.
    pub fn sigma_mu(&self) -> f64 {
        self.sigma_mu
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Non-fatal notes collected while solving.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The payoff quadratic g(w) = (p/2T) w^2 + q w + c.
    fn payoff_quadratic(&self, w: f64) -> f64 {
        (self.p / (2.0 * self.market.horizon)) * w * w + self.q * w + self.c
    }

    /// Coefficients (sign, a, b, c0) with U(X_T(w)) = sign * exp(a w^2 + b w + c0).
    fn utility_log_coeffs(&self) -> (f64, f64, f64, f64) {
        let half_curv = self.p / (2.0 * self.market.horizon);
        match self.family {
            UtilityFamily::Cara { alpha } => (-1.0 / alpha, -half_curv, -self.q, -self.c),
            UtilityFamily::Crra { beta } | UtilityFamily::Hara { beta, .. } => {
                (1.0 / beta, half_curv, self.q, self.c)
            }
        }
    }

    /// Optimal terminal wealth as a function of the Brownian level w.
    pub fn terminal_wealth(&self, w: f64) -> f64 {
        let g = self.payoff_quadratic(w);
        match self.family {
            UtilityFamily::Cara { alpha } => g / alpha,
            UtilityFamily::Crra { beta } => (g / beta).exp(),
            UtilityFamily::Hara { beta, shift } => (g / beta).exp() - shift,
        }
    }

    /// E[U(X_T)] when the true drift's risk adjustment is nu_mu, i.e. when
    /// W_T ~ N(-nu_mu T, T).
    pub fn expected_utility_given_nu(&self, nu_mu: f64) -> Result<f64> {
        let (sign, a, b, c0) = self.utility_log_coeffs();
        let t = self.market.horizon;
        Ok(sign * gaussian_exp_quadratic(a, b, c0, -nu_mu * t, t)?)
    }

    /// E[U(X_T)] when the true drift is mu.
    pub fn expected_utility_given_mu(&self, mu: f64) -> Result<f64> {
        self.expected_utility_given_nu(self.market.nu_of_mu(mu))
    }

    /// Wealth at time t given the Brownian level w, by replication pricing
    /// of the terminal payoff.
    pub fn wealth_feedback(&self, t: f64, w: f64) -> Result<f64> {
        let tau = self.remaining(t)?;
        let nu = self.market.market_price_of_risk();
        let discount = (-self.market.r * tau).exp();
        let half_curv = self.p / (2.0 * self.market.horizon);
        let m = w - nu * tau;
        match self.family {
            UtilityFamily::Cara { alpha } => Ok(discount
                * gaussian_quadratic_mean(half_curv, self.q, self.c, m, tau)
                / alpha),
            UtilityFamily::Crra { beta } => Ok(discount
                * gaussian_exp_quadratic(
                    half_curv / beta,
                    self.q / beta,
                    self.c / beta,
                    m,
                    tau,
                )?),
            UtilityFamily::Hara { beta, shift } => Ok(discount
                * gaussian_exp_quadratic(
                    half_curv / beta,
                    self.q / beta,
                    self.c / beta,
                    m,
                    tau,
                )?
                - shift * discount),
        }
    }

    /// Amount invested in the stock at time t, given the Brownian level w
    /// and current wealth x (feedback form; for the power families the
    /// strategy is proportional to wealth, for the exponential family it
    /// does not depend on it).
    pub fn strategy_feedback(&self, t: f64, w: f64, x: f64) -> Result<f64> {
        let tau = self.remaining(t)?;
        let big_t = self.market.horizon;
        let nu = self.market.market_price_of_risk();
        let sigma = self.market.sigma;
        match self.family {
            UtilityFamily::Cara { alpha } => {
                Ok((-self.market.r * tau).exp() * ((self.p / big_t) * (w - nu * tau) + self.q)
                    / (alpha * sigma))
            }
            UtilityFamily::Crra { beta } => {
                let denom = beta * big_t - tau * self.p;
                Ok((self.p * w + big_t * self.q - tau * self.p * nu) / (sigma * denom) * x)
            }
            UtilityFamily::Hara { beta, shift } => {
                let denom = beta * big_t - tau * self.p;
                let x_eff = x + shift * (-self.market.r * tau).exp();
                Ok((self.p * w + big_t * self.q - tau * self.p * nu) / (sigma * denom) * x_eff)
            }
        }
    }

    /// Amount invested in the stock at time zero.
    pub fn initial_strategy(&self) -> Result<f64> {
        self.strategy_feedback(0.0, 0.0, self.market.x0)
    }

    fn remaining(&self, t: f64) -> Result<f64> {
        let big_t = self.market.horizon;
        if !t.is_finite() || t < 0.0 || t > big_t {
            return Err(Error::InvalidParameter(format!(
                "time must lie in [0, {big_t}], got {t}"
            )));
        }
        Ok(big_t - t)
    }

    /// The ambiguity value of this payoff: the prior average of
    /// phi(E[U(X_T) | drift]), computed by Gauss-Hermite quadrature over the
    /// Gaussian prior with a node-doubling convergence check.
    pub fn value_function(&self, nodes: usize) -> Result<f64> {
        let spread = self.sigma_mu / self.market.sigma;
        let integrand = |z: f64| -> Result<f64> {
            let eu = self.expected_utility_given_nu(spread * z)?;
            self.ambiguity.phi(eu)
        };
        let coarse = gauss_hermite(nodes)?.try_integrate(integrand)?;
        let fine = gauss_hermite(2 * nodes)?.try_integrate(integrand)?;
        let change = (fine - coarse).abs() / (1.0 + fine.abs());
        if change <= PRIOR_DOUBLING_TOL && fine.is_finite() {
            Ok(fine)
        } else {
            Err(Error::PriorIntegralDivergent)
        }
    }

    /// Value of parking everything in the bond, phi(U(x0 e^{rT})): a lower
    /// bound for the optimal value.
    pub fn riskfree_value(&self) -> Result<f64> {
        let terminal = self.market.x0 * self.market.growth_factor();
        self.ambiguity.phi(self.family.eval(terminal)?)
    }

    /// Signed relative budget error (E^Q[X_T] - x0 e^{rT}) / (x0 e^{rT}),
    /// with the risk-neutral expectation computed by quadrature rather than
    /// through the closed form for c.
    pub fn budget_residual(&self, nodes: usize) -> Result<f64> {
        let t = self.market.horizon;
        let nu = self.market.market_price_of_risk();
        let grid = gauss_hermite(nodes)?;
        let mean = grid.integrate(|z| self.terminal_wealth(-nu * t + t.sqrt() * z));
        let target = self.market.x0 * self.market.growth_factor();
        Ok((mean - target) / target)
    }

    /// First-order-condition diagnostic: the ratio
    ///
    ///   U'(X_T(w)) E_prior[phi'(E[U|drift]) dens_drift(w)] / dens_ref(w)
    ///
    /// where dens is the terminal Girsanov density against the reference
    /// measure. At the optimum this ratio is the same for every w (it equals
    /// the Lagrange multiplier of the budget).
    pub fn foc_ratio(&self, w: f64, nodes: usize) -> Result<f64> {
        let t = self.market.horizon;
        let spread = self.sigma_mu / self.market.sigma;
        let grid = gauss_hermite(nodes)?;
        let weighted = grid.try_integrate(|z| {
            let nu_mu = spread * z;
            let eu = self.expected_utility_given_nu(nu_mu)?;
            Ok(self.ambiguity.phi_prime(eu)? * girsanov_density(nu_mu, w, t))
        })?;
        let marginal = self.family.marginal(self.terminal_wealth(w))?;
        let reference = girsanov_density(self.market.market_price_of_risk(), w, t);
        Ok(marginal * weighted / reference)
    }
}

pub(crate) fn check_pairing(family: &UtilityFamily, attitude: &PowerAmbiguity) -> Result<()> {
    let needed = family.phi_branch();
    if attitude.branch() != needed {
        return Err(Error::InvalidParameter(format!(
            "{} utility takes {} values; pair it with the {} attitude branch",
            family.name(),
            match needed {
                PhiBranch::Positive => "positive",
                PhiBranch::Negative => "negative",
            },
            match needed {
                PhiBranch::Positive => "positive",
                PhiBranch::Negative => "negative",
            },
        )));
    }
    Ok(())
}

fn check_centered(mp: &MarketParams, prior: &GaussianDriftPrior) -> Result<()> {
    if (prior.center - mp.mu0).abs() > 1e-12 * (1.0 + mp.mu0.abs()) {
        return Err(Error::InvalidParameter(format!(
            "the closed form assumes the prior is centered at the reference drift {}, got {}",
            mp.mu0, prior.center
        )));
    }
    Ok(())
}

/// Optimal portfolio for exponential utility -exp(-alpha x)/alpha.
pub fn solve_cara(
    mp: &MarketParams,
    prior: &GaussianDriftPrior,
    attitude: &PowerAmbiguity,
    alpha: f64,
) -> Result<ClosedFormSolution> {
    let family = UtilityFamily::Cara { alpha };
    family.validate()?;
    check_pairing(&family, attitude)?;
    check_centered(mp, prior)?;
    let s0 = prior.sigma0_sq(mp)?;
    let gamma = attitude.gamma();
    let nu = mp.market_price_of_risk();
    let t = mp.horizon;

    // p is the positive root of (gamma + s0) p^2 + s0 p - 1 = 0, written in
    // a form with no cancellation that also covers gamma + s0 = 0
    let disc = s0 * s0 + 4.0 * s0 + 4.0 * gamma;
    if disc < 0.0 {
        return Err(Error::NoRealRoot { discriminant: disc });
    }
    let p = 2.0 / (s0 + disc.sqrt());
    let denom = 1.0 + gamma * p;
    if denom <= 0.0 {
        return Err(Error::SolutionInvalid(format!(
            "attitude exponent {gamma} is too negative for precision {s0}: 1 + gamma p = {denom}"
        )));
    }
    let q = (1.0 + p) * nu / denom;
    // budget at time zero fixes c
    let c = alpha * mp.x0 * mp.growth_factor() - 0.5 * p * (nu * nu * t + 1.0) + q * nu * t;

    let mut warnings = Vec::new();
    let min_terminal = (c - q * q * t / (2.0 * p)) / alpha;
    if min_terminal < 0.0 {
        warnings.push(format!(
            "optimal terminal wealth dips below zero (minimum {min_terminal:.6} at w = {:.6})",
            -q * t / p
        ));
    }

    Ok(ClosedFormSolution {
        family,
        ambiguity: *attitude,
        market: *mp,
        sigma_mu: prior.sigma_mu,
        p,
        q,
        c,
        warnings,
    })
}

fn power_pq(s0: f64, gamma: f64, beta: f64, nu: f64) -> Result<(f64, f64)> {
    // p is the smaller root of (gamma + s0) p^2 - (s0 + 1/(1-beta)) p
    // + beta/(1-beta) = 0; the 2C/(-B + sqrt(disc)) form picks it for every
    // sign of the leading coefficient and degrades gracefully to the linear
    // equation when gamma + s0 = 0
    let k = 1.0 / (1.0 - beta);
    let neg_b = s0 + k;
    let c_term = beta * k;
    let a = gamma + s0;
    let disc = neg_b * neg_b - 4.0 * a * c_term;
    if disc < 0.0 {
        return Err(Error::NoRealRoot { discriminant: disc });
    }
    let p = 2.0 * c_term / (neg_b + disc.sqrt());
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::SolutionInvalid(format!(
            "curvature coefficient p = {p} is outside (0, 1)"
        )));
    }
    if p >= beta {
        return Err(Error::FeedbackMapSingular { p, beta });
    }
    let q = beta * (1.0 - p) * nu / ((1.0 - beta) * (1.0 - gamma * p));
    Ok((p, q))
}

fn power_c(x_eff: f64, p: f64, q: f64, beta: f64, mp: &MarketParams) -> f64 {
    let nu = mp.market_price_of_risk();
    let t = mp.horizon;
    let shortfall = nu - q / beta;
    beta * (x_eff.ln()
        + mp.r * t
        + 0.5 * t * (nu * nu - shortfall * shortfall / (1.0 - p / beta))
        + 0.5 * (1.0 - p / beta).ln())
}

/// Optimal portfolio for power utility x^beta / beta.
pub fn solve_crra(
    mp: &MarketParams,
    prior: &GaussianDriftPrior,
    attitude: &PowerAmbiguity,
    beta: f64,
) -> Result<ClosedFormSolution> {
    let family = UtilityFamily::Crra { beta };
    family.validate()?;
    check_pairing(&family, attitude)?;
    check_centered(mp, prior)?;
    let s0 = prior.sigma0_sq(mp)?;
    let (p, q) = power_pq(s0, attitude.gamma(), beta, mp.market_price_of_risk())?;
    let c = power_c(mp.x0, p, q, beta, mp);
    Ok(ClosedFormSolution {
        family,
        ambiguity: *attitude,
        market: *mp,
        sigma_mu: prior.sigma_mu,
        p,
        q,
        c,
        warnings: Vec::new(),
    })
}

/// Optimal portfolio for shifted power utility (x + shift)^beta / beta.
pub fn solve_hara(
    mp: &MarketParams,
    prior: &GaussianDriftPrior,
    attitude: &PowerAmbiguity,
    beta: f64,
    shift: f64,
) -> Result<ClosedFormSolution> {
    let family = UtilityFamily::Hara { beta, shift };
    family.validate()?;
    check_pairing(&family, attitude)?;
    check_centered(mp, prior)?;
    let x_eff = mp.x0 + shift * (-mp.r * mp.horizon).exp();
    if x_eff <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "initial capital plus discounted shift must be positive, got {x_eff}"
        )));
    }
    let s0 = prior.sigma0_sq(mp)?;
    let (p, q) = power_pq(s0, attitude.gamma(), beta, mp.market_price_of_risk())?;
    let c = power_c(x_eff, p, q, beta, mp);
    Ok(ClosedFormSolution {
        family,
        ambiguity: *attitude,
        market: *mp,
        sigma_mu: prior.sigma_mu,
        p,
        q,
        c,
        warnings: Vec::new(),
    })
}

/// Dispatches to the family-specific solver.
pub fn solve(
    mp: &MarketParams,
    prior: &GaussianDriftPrior,
    attitude: &PowerAmbiguity,
    family: &UtilityFamily,
) -> Result<ClosedFormSolution> {
    match *family {
        UtilityFamily::Cara { alpha } => solve_cara(mp, prior, attitude, alpha),
        UtilityFamily::Crra { beta } => solve_crra(mp, prior, attitude, beta),
        UtilityFamily::Hara { beta, shift } => solve_hara(mp, prior, attitude, beta, shift),
    }
}

/// The classical no-ambiguity optimum for the same market and utility: the
/// limit of the ambiguous solution as the prior collapses onto the point
/// estimate. Its payoff is log-linear (p = 0) in the Brownian level.
#[derive(Debug, Clone, Copy)]
pub struct MertonBaseline {
    family: UtilityFamily,
    market: MarketParams,
}

impl MertonBaseline {
    pub fn new(family: UtilityFamily, market: MarketParams) -> Result<Self> {
        family.validate()?;
        if let UtilityFamily::Hara { shift, .. } = family {
            let x_eff = market.x0 + shift * (-market.r * market.horizon).exp();
            if x_eff <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "initial capital plus discounted shift must be positive, got {x_eff}"
                )));
            }
        }
        Ok(MertonBaseline { family, market })
    }

    pub fn family(&self) -> &UtilityFamily {
        &self.family
    }

    pub fn market(&self) -> &MarketParams {
        &self.market
    }

    /// Payoff coefficients (p, q, c) in the same quadratic parameterization
    /// as the ambiguous solution; p is always zero here.
    pub fn coefficients(&self) -> (f64, f64, f64) {
        let mp = &self.market;
        let nu = mp.market_price_of_risk();
        let t = mp.horizon;
        match self.family {
            UtilityFamily::Cara { alpha } => {
                (0.0, nu, alpha * mp.x0 * mp.growth_factor() + nu * nu * t)
            }
            UtilityFamily::Crra { beta } => {
                let q = beta * nu / (1.0 - beta);
                let k = 1.0 - beta;
                let c = beta
                    * (mp.x0.ln() + mp.r * t + nu * nu * t / k - nu * nu * t / (2.0 * k * k));
                (0.0, q, c)
            }
            UtilityFamily::Hara { beta, shift } => {
                let x_eff = mp.x0 + shift * (-mp.r * t).exp();
                let q = beta * nu / (1.0 - beta);
                let k = 1.0 - beta;
                let c = beta
                    * (x_eff.ln() + mp.r * t + nu * nu * t / k - nu * nu * t / (2.0 * k * k));
                (0.0, q, c)
            }
        }
    }

    /// Wraps the baseline as a [`ClosedFormSolution`] so it can be evaluated
    /// under an ambiguity attitude and prior spread, e.g. to compare the
    /// ambiguity-neutral strategy with the ambiguity-adjusted one under the
    /// same criterion.
    pub fn as_solution(
        &self,
        attitude: &PowerAmbiguity,
        sigma_mu: f64,
    ) -> Result<ClosedFormSolution> {
        check_pairing(&self.family, attitude)?;
        if !sigma_mu.is_finite() || sigma_mu < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "prior spread must be >= 0, got {sigma_mu}"
            )));
        }
        let (p, q, c) = self.coefficients();
        Ok(ClosedFormSolution {
            family: self.family,
            ambiguity: *attitude,
            market: self.market,
            sigma_mu,
            p,
            q,
            c,
            warnings: Vec::new(),
        })
    }

    /// Amount invested in the stock at time t with wealth x.
    pub fn strategy_feedback(&self, t: f64, w: f64, x: f64) -> Result<f64> {
        self.neutral_attitude().and_then(|s| s.strategy_feedback(t, w, x))
    }

    /// Amount invested in the stock at time zero.
    pub fn initial_strategy(&self) -> Result<f64> {
        self.neutral_attitude().and_then(|s| s.initial_strategy())
    }

    pub fn terminal_wealth(&self, w: f64) -> Result<f64> {
        self.neutral_attitude().map(|s| s.terminal_wealth(w))
    }

    /// E[U(X_T)] when the true drift's risk adjustment is nu_mu.
    pub fn expected_utility_given_nu(&self, nu_mu: f64) -> Result<f64> {
        self.neutral_attitude().and_then(|s| s.expected_utility_given_nu(nu_mu))
    }

    pub fn expected_utility_given_mu(&self, mu: f64) -> Result<f64> {
        self.expected_utility_given_nu(self.market.nu_of_mu(mu))
    }

    fn neutral_attitude(&self) -> Result<ClosedFormSolution> {
        let attitude = PowerAmbiguity::new(0.0, self.family.phi_branch())?;
        self.as_solution(&attitude, 0.0)
    }
}
