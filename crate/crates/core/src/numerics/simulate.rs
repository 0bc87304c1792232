//! Monte Carlo replication checks.
//!
//! The closed-form strategies are verified by driving their feedback form
//! through an Euler-Maruyama discretization of the self-financing wealth
//! equation and comparing the simulated terminal wealth against the known
//! terminal payoff, path by path. The integrator works on discounted wealth,
//! so a zero strategy reproduces the bond account to the last bit, and the
//! error of a replicating strategy is pure discretization error: its mean
//! across paths should shrink like (step count)^(-1/2).
//!
//! Every path owns one counter-based RNG stream keyed by its index, which
//! makes results independent of thread scheduling and bit-reproducible for
//! a fixed seed.

use crate::closed_form::ClosedFormSolution;
use crate::error::{Error, Result};
use crate::market::MarketParams;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Measure to simulate under. The wealth equation is the same in all of
/// them; only the drift of the driving Brownian motion changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// Physical measure with the stock drift at its point estimate.
    Reference,
    /// Martingale measure for discounted wealth.
    RiskNeutral,
    /// Physical measure when the true drift is the given mu.
    Drift(f64),
}

impl Measure {
    /// Drift correction theta with dW_ref = dB - theta dt, where B is the
    /// Brownian motion of this measure and W_ref the reference-measure level
    /// the closed forms are written in.
    fn theta(&self, mp: &MarketParams) -> f64 {
        match *self {
            Measure::Reference => 0.0,
            Measure::RiskNeutral => mp.market_price_of_risk(),
            Measure::Drift(mu) => mp.nu_of_mu(mu),
        }
    }

    /// The stock drift this measure actually applies.
    fn effective_drift(&self, mp: &MarketParams) -> f64 {
        mp.mu0 - mp.sigma * self.theta(mp)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub n_paths: u64,
    /// Step count at the finest refinement level; must be divisible by 4.
    pub n_steps: usize,
    pub seed: u64,
    pub measure: Measure,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("need at least one path".into()));
        }
        if self.n_steps < 4 || self.n_steps % 4 != 0 {
            return Err(Error::InvalidParameter(format!(
                "step count must be a multiple of 4, got {}",
                self.n_steps
            )));
        }
        Ok(())
    }
}

/// Outcome of a replication experiment across three nested refinement
/// levels (n/4, n/2, n steps on the same Brownian paths).
#[derive(Debug, Clone)]
pub struct ReplicationReport {
    /// Step counts, coarse to fine.
    pub levels: Vec<usize>,
    /// Mean relative terminal error at each level.
    pub mean_rel_errors: Vec<f64>,
    /// Largest relative terminal error at the finest level.
    pub max_pathwise_error: f64,
    /// Mean relative terminal error at the finest level.
    pub mean_error: f64,
    /// Average log2 decay rate of the mean error per halving of the step
    /// size; 0.5 for an order-1/2 strong scheme.
    pub slope_estimate: f64,
}

/// Replicates the solution's terminal payoff by trading its feedback
/// strategy along simulated paths.
pub fn simulate_replication(
    sol: &ClosedFormSolution,
    cfg: &SimConfig,
) -> Result<ReplicationReport> {
    cfg.validate()?;
    let mp = *sol.market();
    let theta = cfg.measure.theta(&mp);
    let mu_eff = cfg.measure.effective_drift(&mp);
    let levels = [cfg.n_steps / 4, cfg.n_steps / 2, cfg.n_steps];

    let per_path: Vec<[f64; 3]> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|path| replicate_path(sol, &mp, theta, mu_eff, &levels, cfg, path))
        .collect::<Result<_>>()?;

    let n = per_path.len() as f64;
    let mut mean_rel_errors = vec![0.0; levels.len()];
    for errs in &per_path {
        for (acc, e) in mean_rel_errors.iter_mut().zip(errs) {
            *acc += e;
        }
    }
    for acc in &mut mean_rel_errors {
        *acc /= n;
    }
    let max_pathwise_error =
        per_path.iter().map(|e| e[2]).fold(0.0f64, f64::max);
    let slopes: Vec<f64> = mean_rel_errors
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect();
    let slope_estimate = slopes.iter().sum::<f64>() / slopes.len() as f64;

    Ok(ReplicationReport {
        levels: levels.to_vec(),
        mean_error: mean_rel_errors[2],
        mean_rel_errors,
        max_pathwise_error,
        slope_estimate,
    })
}

fn replicate_path(
    sol: &ClosedFormSolution,
    mp: &MarketParams,
    theta: f64,
    mu_eff: f64,
    levels: &[usize; 3],
    cfg: &SimConfig,
    path: u64,
) -> Result<[f64; 3]> {
    let t = mp.horizon;
    let fine_steps = levels[2];
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(path);
    let sqrt_dt = (t / fine_steps as f64).sqrt();
    let fine: Vec<f64> = (0..fine_steps)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * sqrt_dt
        })
        .collect();
    let w_terminal = fine.iter().sum::<f64>() - theta * t;
    let exact = sol.terminal_wealth(w_terminal);

    let mut out = [0.0; 3];
    for (slot, &steps) in out.iter_mut().zip(levels) {
        let chunk = fine_steps / steps;
        let dt = t / steps as f64;
        let mut discounted = mp.x0;
        let mut w = 0.0;
        for k in 0..steps {
            let tk = k as f64 * dt;
            let db: f64 = fine[k * chunk..(k + 1) * chunk].iter().sum();
            let wealth = (mp.r * tk).exp() * discounted;
            let pi = sol.strategy_feedback(tk, w, wealth)?;
            discounted += (-mp.r * tk).exp() * pi * ((mu_eff - mp.r) * dt + mp.sigma * db);
            w += db - theta * dt;
            if !discounted.is_finite() || !w.is_finite() {
                return Err(Error::PathBlowUp { path });
            }
        }
        let simulated = (mp.r * t).exp() * discounted;
        *slot = (simulated - exact).abs() / exact.abs().max(1.0);
    }
    Ok(out)
}

/// Drives the integrator with an identically zero strategy and returns the
/// largest deviation of discounted wealth from the initial capital across
/// paths. Because the integrator works on discounted wealth this must be
/// exactly zero; anything else indicates drift leaking into the bond
/// account.
pub fn risk_free_control_error(mp: &MarketParams, cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    let mu_eff = cfg.measure.effective_drift(mp);
    let t = mp.horizon;

    let deviations: Vec<f64> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(path);
            let dt = t / cfg.n_steps as f64;
            let sqrt_dt = dt.sqrt();
            let mut discounted = mp.x0;
            for k in 0..cfg.n_steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                let db = z * sqrt_dt;
                let tk = k as f64 * dt;
                let pi = 0.0;
                discounted += (-mp.r * tk).exp() * pi * ((mu_eff - mp.r) * dt + mp.sigma * db);
            }
            (discounted - mp.x0).abs()
        })
        .collect();

    Ok(deviations.into_iter().fold(0.0f64, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::{GaussianDriftPrior, PhiBranch, PowerAmbiguity};
    use crate::closed_form::{solve_cara, solve_crra};

    fn base_market() -> MarketParams {
        MarketParams::new(0.1, 0.05, 0.2, 4.0, 1.0).unwrap()
    }

    fn base_crra() -> ClosedFormSolution {
        let prior = GaussianDriftPrior::new(0.1, 0.05).unwrap();
        let attitude = PowerAmbiguity::new(-0.5, PhiBranch::Positive).unwrap();
        solve_crra(&base_market(), &prior, &attitude, 1.0 / 3.0).unwrap()
    }

    #[test]
    fn zero_strategy_reproduces_the_bond_exactly() {
        let mp = base_market();
        for measure in [Measure::Reference, Measure::RiskNeutral, Measure::Drift(0.15)] {
            let cfg = SimConfig { n_paths: 64, n_steps: 64, seed: 7, measure };
            assert_eq!(risk_free_control_error(&mp, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn replication_error_decays_at_order_one_half() {
        let cfg = SimConfig {
            n_paths: 400,
            n_steps: 512,
            seed: 20240817,
            measure: Measure::Reference,
        };
        let report = simulate_replication(&base_crra(), &cfg).unwrap();
        assert_eq!(report.levels, vec![128, 256, 512]);
        assert!(report.mean_error > 0.0);
        assert!(report.mean_error < 0.05, "mean error {}", report.mean_error);
        assert!(
            (report.slope_estimate - 0.5).abs() < 0.2,
            "slope {}",
            report.slope_estimate
        );
        for pair in report.mean_rel_errors.windows(2) {
            assert!(pair[1] < pair[0], "errors not decreasing: {:?}", report.mean_rel_errors);
        }
    }

    #[test]
    fn exponential_strategy_replicates_too() {
        let prior = GaussianDriftPrior::new(0.1, 0.05).unwrap();
        let attitude = PowerAmbiguity::new(-0.5, PhiBranch::Negative).unwrap();
        let sol = solve_cara(&base_market(), &prior, &attitude, 1.0).unwrap();
        let cfg = SimConfig {
            n_paths: 300,
            n_steps: 512,
            seed: 3,
            measure: Measure::Drift(0.12),
        };
        let report = simulate_replication(&sol, &cfg).unwrap();
        assert!(report.mean_error < 0.05, "mean error {}", report.mean_error);
        assert!((report.slope_estimate - 0.5).abs() < 0.25, "slope {}", report.slope_estimate);
    }

    #[test]
    fn reports_are_reproducible_for_a_fixed_seed() {
        let cfg = SimConfig {
            n_paths: 100,
            n_steps: 128,
            seed: 99,
            measure: Measure::Reference,
        };
        let sol = base_crra();
        let a = simulate_replication(&sol, &cfg).unwrap();
        let b = simulate_replication(&sol, &cfg).unwrap();
        assert_eq!(a.mean_rel_errors, b.mean_rel_errors);
        assert_eq!(a.max_pathwise_error, b.max_pathwise_error);
        assert_eq!(a.slope_estimate, b.slope_estimate);
        let other = SimConfig { seed: 100, ..cfg };
        let c = simulate_replication(&sol, &other).unwrap();
        assert_ne!(a.mean_rel_errors, c.mean_rel_errors);
    }

    #[test]
    fn discounted_wealth_is_a_martingale_under_the_pricing_measure() {
        let sol = base_crra();
        let mp = *sol.market();
        let cfg = SimConfig {
            n_paths: 4000,
            n_steps: 256,
            seed: 11,
            measure: Measure::RiskNeutral,
        };
        // mean discounted terminal wealth of the traded strategy should be
        // near x0 under the pricing measure
        let theta = cfg.measure.theta(&mp);
        let mu_eff = cfg.measure.effective_drift(&mp);
        let mut total = 0.0;
        for path in 0..cfg.n_paths {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(path);
            let dt = mp.horizon / cfg.n_steps as f64;
            let sqrt_dt = dt.sqrt();
            let mut discounted = mp.x0;
            let mut w = 0.0;
            for k in 0..cfg.n_steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                let db = z * sqrt_dt;
                let tk = k as f64 * dt;
                let wealth = (mp.r * tk).exp() * discounted;
                let pi = sol.strategy_feedback(tk, w, wealth).unwrap();
                discounted += (-mp.r * tk).exp() * pi * ((mu_eff - mp.r) * dt + mp.sigma * db);
                w += db - theta * dt;
            }
            total += discounted;
        }
        let mean = total / cfg.n_paths as f64;
        assert!((mean - mp.x0).abs() < 0.05, "mean discounted wealth {mean}");
    }

    #[test]
    fn rejects_bad_configs() {
        let mp = base_market();
        let bad_steps = SimConfig { n_paths: 10, n_steps: 6, seed: 1, measure: Measure::Reference };
        assert!(risk_free_control_error(&mp, &bad_steps).is_err());
        let no_paths = SimConfig { n_paths: 0, n_steps: 64, seed: 1, measure: Measure::Reference };
        assert!(risk_free_control_error(&mp, &no_paths).is_err());
    }
}
