//! Weighted expected-utility frontier for finitely many candidate drifts.
//!
//! With candidate drifts mu_1..mu_k and prior probabilities p_i, each
//! nonnegative reweighting lambda (normalized so sum lambda_i p_i = 1)
//! defines an auxiliary problem: maximize sum_i lambda_i p_i E_i[U(X_T)]
//! under the budget. Its solution is explicit up to one scalar: the terminal
//! payoff is I(kappa dens_ref / dens_mix), where dens_ref is the pricing
//! density, dens_mix the lambda-weighted mixture of the candidate densities,
//! I the inverse marginal utility, and kappa > 0 solves the budget equation.
//!
//! Sweeping lambda traces the Pareto frontier of achievable per-drift
//! expected utilities (b_1, .., b_k). The smooth ambiguity optimum sits on
//! that frontier at the lambda that reproduces itself through
//! lambda_i = phi'(b_i) / sum_j p_j phi'(b_j), a damped fixed-point
//! iteration away. For utilities with multiplicative (power) or
//! translation (exponential) structure the weighted value factors as
//! J(x, lambda) = h(x) rho(lambda), which [`separability_check`] verifies
//! numerically.

use crate::ambiguity::{DiscreteDriftPrior, PowerAmbiguity, PriorWeights};
use crate::closed_form::{check_pairing, UtilityFamily};
use crate::error::{Error, Result};
use crate::market::{girsanov_density, MarketParams};
use crate::numerics::{find_root_monotone, gauss_hermite};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// The lambda-weighted mixture of terminal candidate densities against the
/// reference measure, evaluated at Brownian level w.
pub fn mixture_density(
    prior: &DiscreteDriftPrior,
    weights: &PriorWeights,
    mp: &MarketParams,
    w: f64,
) -> f64 {
    let t = mp.horizon;
    prior
        .points()
        .iter()
        .zip(weights.lambda())
        .map(|(pt, &l)| l * pt.prob * girsanov_density(mp.nu_of_mu(pt.mu), w, t))
        .sum()
}

/// Solution of one weighted expected-utility problem.
#[derive(Debug, Clone)]
pub struct FrontierPoint {
    /// The reweighting that defines the problem.
    pub lambda: Vec<f64>,
    /// Per-drift expected utilities b_i of the optimal payoff.
    pub expected_utilities: Vec<f64>,
    /// The weighted objective sum_i lambda_i p_i b_i.
    pub weighted_value: f64,
    /// Budget multiplier: U'(X_T) = kappa dens_ref / dens_mix.
    pub kappa: f64,
}

fn budget_gap(
    mp: &MarketParams,
    prior: &DiscreteDriftPrior,
    family: &UtilityFamily,
    weights: &PriorWeights,
    grid: &crate::numerics::QuadratureGrid,
    kappa: f64,
) -> Result<f64> {
    let t = mp.horizon;
    let nu = mp.market_price_of_risk();
    let sqrt_t = t.sqrt();
    let mean = grid.try_integrate(|z| {
        let w = sqrt_t * z;
        let pricing = girsanov_density(nu, w, t);
        let payoff = family.inverse_marginal(kappa * pricing / mixture_density(prior, weights, mp, w))?;
        Ok(payoff * pricing)
    })?;
    Ok(mean - mp.x0 * mp.growth_factor())
}

/// Solves the weighted problem for one reweighting: finds kappa from the
/// budget, then evaluates the per-drift expected utilities of the optimal
/// payoff by quadrature with `nodes` Gauss-Hermite points.
pub fn solve_weighted_eut(
    mp: &MarketParams,
    prior: &DiscreteDriftPrior,
    family: &UtilityFamily,
    weights: &PriorWeights,
    nodes: usize,
) -> Result<FrontierPoint> {
    family.validate()?;
    if weights.lambda().len() != prior.len() {
        return Err(Error::InvalidParameter(format!(
            "weight vector length {} does not match prior size {}",
            weights.lambda().len(),
            prior.len()
        )));
    }
    let grid = gauss_hermite(nodes)?;

    // the budget is strictly decreasing in kappa: expand a geometric
    // bracket from 1 and bisect
    let gap = |kappa: f64| budget_gap(mp, prior, family, weights, &grid, kappa);
    let mut lo = 1.0_f64;
    let mut hi = 1.0_f64;
    let mut gap_lo = gap(lo)?;
    let mut gap_hi = gap_lo;
    let mut expansions = 0;
    while gap_lo < 0.0 {
        lo *= 0.5;
        gap_lo = gap(lo)?;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::KappaNotBracketed);
        }
    }
    while gap_hi > 0.0 {
        hi *= 2.0;
        gap_hi = gap(hi)?;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::KappaNotBracketed);
        }
    }
    let kappa = if gap_lo == 0.0 {
        lo
    } else if gap_hi == 0.0 {
        hi
    } else {
        find_root_monotone(|k| gap(k).unwrap_or(f64::NAN), lo, hi, 1e-12)?
    };

    let t = mp.horizon;
    let nu = mp.market_price_of_risk();
    let sqrt_t = t.sqrt();
    let payoff = |w: f64| -> Result<f64> {
        family.inverse_marginal(
            kappa * girsanov_density(nu, w, t) / mixture_density(prior, weights, mp, w),
        )
    };
    let mut expected_utilities = Vec::with_capacity(prior.len());
    for pt in prior.points() {
        let nu_i = mp.nu_of_mu(pt.mu);
        let b = grid.try_integrate(|z| {
            let w = sqrt_t * z;
            Ok(family.eval(payoff(w)?)? * girsanov_density(nu_i, w, t))
        })?;
        expected_utilities.push(b);
    }
    let weighted_value = expected_utilities
        .iter()
        .zip(weights.lambda())
        .zip(prior.points())
        .map(|((b, &l), pt)| l * pt.prob * b)
        .sum();

    Ok(FrontierPoint {
        lambda: weights.lambda().to_vec(),
        expected_utilities,
        weighted_value,
        kappa,
    })
}

/// Traces the frontier for exactly two candidate drifts by sweeping
/// lambda_1 over [0, 1/p_1] on a uniform grid of `grid_size` points.
pub fn trace_frontier(
    mp: &MarketParams,
    prior: &DiscreteDriftPrior,
    family: &UtilityFamily,
    grid_size: usize,
    nodes: usize,
) -> Result<Vec<FrontierPoint>> {
    if prior.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "the frontier sweep needs exactly two candidate drifts, got {}",
            prior.len()
        )));
    }
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "frontier grid needs at least two points, got {grid_size}"
        )));
    }
    let p1 = prior.points()[0].prob;
    let p2 = prior.points()[1].prob;
    // grid points are independent problems; order is restored by collect
    (0..grid_size)
        .into_par_iter()
        .map(|k| {
            let lambda1 = k as f64 / (grid_size - 1) as f64 / p1;
            let lambda2 = (1.0 - lambda1 * p1) / p2;
            let weights = PriorWeights::new(vec![lambda1, lambda2.max(0.0)], prior)?;
            solve_weighted_eut(mp, prior, family, &weights, nodes)
        })
        .collect()
}

/// Options for the fixed-point search over reweightings.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    /// Fraction of the update applied each step, in (0, 1].
    pub damping: f64,
    /// Convergence threshold on the sup-norm of the self-map mismatch.
    pub tol: f64,
    pub max_iter: usize,
    /// Gauss-Hermite nodes for the inner weighted solves.
    pub nodes: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { damping: 0.5, tol: 1e-10, max_iter: 500, nodes: 128 }
    }
}

/// Converged output of [`fixed_point_lambda`].
#[derive(Debug, Clone)]
pub struct FixedPointResult {
    /// The self-reproducing reweighting.
    pub weights: PriorWeights,
    /// The weighted solution at those weights.
    pub point: FrontierPoint,
    /// The smooth ambiguity value sum_i p_i phi(b_i) at the fixed point.
    pub phi_value: f64,
    pub iterations: usize,
    /// Final sup-norm mismatch between the weights and their image.
    pub residual: f64,
}

/// Finds the reweighting that reproduces itself through
/// lambda_i = phi'(b_i) / sum_j p_j phi'(b_j), by damped iteration from
/// `start`. The weighted solution at that lambda is the smooth ambiguity
/// optimum over terminal payoffs.
pub fn fixed_point_lambda(
    mp: &MarketParams,
    prior: &DiscreteDriftPrior,
    family: &UtilityFamily,
    attitude: &PowerAmbiguity,
    start: &PriorWeights,
    opts: &FixedPointOptions,
) -> Result<FixedPointResult> {
    check_pairing(family, attitude)?;
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in (0, 1], got {}",
            opts.damping
        )));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "fixed-point search needs tol > 0 and at least one iteration".into(),
        ));
    }
    let probs: Vec<f64> = prior.points().iter().map(|pt| pt.prob).collect();
    let mut weights = PriorWeights::normalized(start.lambda(), prior)?;
    let mut residual = f64::INFINITY;
    for iteration in 1..=opts.max_iter {
        let point = solve_weighted_eut(mp, prior, family, &weights, opts.nodes)?;
        let marginal_phi: Vec<f64> = point
            .expected_utilities
            .iter()
            .map(|&b| attitude.phi_prime(b))
            .collect::<Result<_>>()?;
        let denom: f64 = marginal_phi.iter().zip(&probs).map(|(m, p)| m * p).sum();
        let image: Vec<f64> = marginal_phi.iter().map(|m| m / denom).collect();
        residual = image
            .iter()
            .zip(weights.lambda())
            .map(|(i, l)| (i - l).abs())
            .fold(0.0, f64::max);
        if residual <= opts.tol {
            let phi_value = point
                .expected_utilities
                .iter()
                .zip(&probs)
                .map(|(&b, p)| Ok(p * attitude.phi(b)?))
                .sum::<Result<f64>>()?;
            return Ok(FixedPointResult {
                weights,
                point,
                phi_value,
                iterations: iteration,
                residual,
            });
        }
        let next: Vec<f64> = weights
            .lambda()
            .iter()
            .zip(&image)
            .map(|(l, i)| (1.0 - opts.damping) * l + opts.damping * i)
            .collect();
        weights = PriorWeights::normalized(&next, prior)?;
    }
    Err(Error::FixedPointNotConverged { residual, iterations: opts.max_iter })
}

/// Numerical check of the product form J(x, lambda) = h(x) rho(lambda) of
/// the weighted value.
#[derive(Debug, Clone)]
pub struct SeparabilityReport {
    /// Ratio of the second to the first singular value of the value matrix
    /// J(x_i, lambda_j); zero for an exactly rank-one matrix.
    pub rank_one_defect: f64,
    /// Largest absolute deviation |J(x_i, lambda_j) / rho(lambda_j) - h(x_i)|
    /// with h(x) = U(x e^{rT}) and rho estimated from the first capital.
    pub factor_defect: f64,
}

/// Evaluates the weighted value on a capital x weight grid and measures how
/// far it is from a rank-one product.
pub fn separability_check(
    mp: &MarketParams,
    prior: &DiscreteDriftPrior,
    family: &UtilityFamily,
    capitals: &[f64],
    weight_rows: &[PriorWeights],
    nodes: usize,
) -> Result<SeparabilityReport> {
    if capitals.len() < 2 || weight_rows.len() < 2 {
        return Err(Error::InvalidParameter(
            "separability check needs at least two capitals and two weight rows".into(),
        ));
    }
    if capitals.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter("capitals must be positive and finite".into()));
    }
    let mut values = DMatrix::<f64>::zeros(capitals.len(), weight_rows.len());
    for (i, &x) in capitals.iter().enumerate() {
        let market = mp.with_x0(x)?;
        for (j, weights) in weight_rows.iter().enumerate() {
            values[(i, j)] =
                solve_weighted_eut(&market, prior, family, weights, nodes)?.weighted_value;
        }
    }

    let growth = mp.growth_factor();
    let h: Vec<f64> = capitals
        .iter()
        .map(|&x| family.eval(x * growth))
        .collect::<Result<_>>()?;
    let mut factor_defect = 0.0_f64;
    for j in 0..weight_rows.len() {
        let rho = values[(0, j)] / h[0];
        for i in 1..capitals.len() {
            factor_defect = factor_defect.max((values[(i, j)] / rho - h[i]).abs());
        }
    }

    let svd = values.svd(false, false);
    let mut singular: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rank_one_defect = singular[1] / singular[0];

    Ok(SeparabilityReport { rank_one_defect, factor_defect })
}
