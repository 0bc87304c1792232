//! Python bindings for the closed-form solvers and frontier routines.
//!
//! The module mirrors the Rust API in a thin way: a `Market` parameter
//! bundle, solver functions returning `Solution` handles, and free functions
//! for quadrature, frontier tracing, and the fixed-point weights. All
//! domain errors surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use smoothamb as core;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(module = "smoothamb_py")]
struct Market {
    inner: core::MarketParams,
}

#[pymethods]
impl Market {
    #[new]
    #[pyo3(signature = (mu0, r, sigma, horizon, x0=1.0))]
    fn new(mu0: f64, r: f64, sigma: f64, horizon: f64, x0: f64) -> PyResult<Self> {
        Ok(Self { inner: core::MarketParams::new(mu0, r, sigma, horizon, x0).map_err(err)? })
    }

    #[getter]
    fn mu0(&self) -> f64 {
        self.inner.mu0
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.horizon
    }

    #[getter]
    fn x0(&self) -> f64 {
        self.inner.x0
    }

    /// Market price of risk (mu0 - r) / sigma.
    #[getter]
    fn nu(&self) -> f64 {
        self.inner.market_price_of_risk()
    }

    fn __repr__(&self) -> String {
        let m = &self.inner;
        format!(
            "Market(mu0={}, r={}, sigma={}, horizon={}, x0={})",
            m.mu0, m.r, m.sigma, m.horizon, m.x0
        )
    }
}

/// A solved instance: coefficient triple plus the feedback maps.
#[pyclass(module = "smoothamb_py")]
struct Solution {
    inner: core::ClosedFormSolution,
}

#[pymethods]
impl Solution {
    #[getter]
    fn p(&self) -> f64 {
        self.inner.p()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c()
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().name()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().to_vec()
    }

    /// Optimal terminal wealth as a function of the terminal Brownian level.
    fn terminal_wealth(&self, w: f64) -> f64 {
        self.inner.terminal_wealth(w)
    }

    /// Optimal wealth at time t given the Brownian level w.
    fn wealth(&self, t: f64, w: f64) -> PyResult<f64> {
        self.inner.wealth_feedback(t, w).map_err(err)
    }

    /// Money invested in the stock at time t, Brownian level w, wealth x.
    fn strategy(&self, t: f64, w: f64, x: f64) -> PyResult<f64> {
        self.inner.strategy_feedback(t, w, x).map_err(err)
    }

    /// Money invested in the stock at time zero.
    fn initial_strategy(&self) -> PyResult<f64> {
        self.inner.initial_strategy().map_err(err)
    }

    /// Ambiguity-adjusted certainty value of the solution.
    #[pyo3(signature = (nodes=128))]
    fn value(&self, nodes: usize) -> PyResult<f64> {
        self.inner.value_function(nodes).map_err(err)
    }

    /// Signed relative gap between the replication cost and the budget.
    #[pyo3(signature = (nodes=128))]
    fn budget_residual(&self, nodes: usize) -> PyResult<f64> {
        self.inner.budget_residual(nodes).map_err(err)
    }

    /// Expected utility of the optimal terminal wealth if the drift is mu.
    fn expected_utility(&self, mu: f64) -> PyResult<f64> {
        self.inner.expected_utility_given_mu(mu).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(family='{}', p={}, q={}, c={})",
            self.inner.family().name(),
            self.inner.p(),
            self.inner.q(),
            self.inner.c()
        )
    }
}

fn gaussian_prior(market: &Market, sigma_mu: f64) -> PyResult<core::GaussianDriftPrior> {
    core::GaussianDriftPrior::new(market.inner.mu0, sigma_mu).map_err(err)
}

fn solve_with(
    market: &Market,
    gamma: f64,
    sigma_mu: f64,
    family: core::UtilityFamily,
) -> PyResult<Solution> {
    let prior = gaussian_prior(market, sigma_mu)?;
    let attitude = core::PowerAmbiguity::new(gamma, family.phi_branch()).map_err(err)?;
    let inner = core::solve(&market.inner, &prior, &attitude, &family).map_err(err)?;
    Ok(Solution { inner })
}

fn merton_with(market: &Market, family: core::UtilityFamily) -> PyResult<Solution> {
    let baseline = core::MertonBaseline::new(family, market.inner).map_err(err)?;
    let attitude = core::PowerAmbiguity::new(0.0, family.phi_branch()).map_err(err)?;
    Ok(Solution { inner: baseline.as_solution(&attitude, 0.0).map_err(err)? })
}

/// Power utility x^beta / beta under a Gaussian drift prior.
#[pyfunction]
fn solve_crra(market: &Market, gamma: f64, sigma_mu: f64, beta: f64) -> PyResult<Solution> {
    solve_with(market, gamma, sigma_mu, core::UtilityFamily::Crra { beta })
}

/// Exponential utility -exp(-alpha x) / alpha under a Gaussian drift prior.
#[pyfunction]
fn solve_cara(market: &Market, gamma: f64, sigma_mu: f64, alpha: f64) -> PyResult<Solution> {
    solve_with(market, gamma, sigma_mu, core::UtilityFamily::Cara { alpha })
}

/// Shifted power utility (x + a)^beta / beta under a Gaussian drift prior.
#[pyfunction]
fn solve_hara(market: &Market, gamma: f64, sigma_mu: f64, beta: f64, a: f64) -> PyResult<Solution> {
    solve_with(market, gamma, sigma_mu, core::UtilityFamily::Hara { beta, shift: a })
}

/// No-ambiguity benchmark for power utility.
#[pyfunction]
fn merton_crra(market: &Market, beta: f64) -> PyResult<Solution> {
    merton_with(market, core::UtilityFamily::Crra { beta })
}

/// No-ambiguity benchmark for exponential utility.
#[pyfunction]
fn merton_cara(market: &Market, alpha: f64) -> PyResult<Solution> {
    merton_with(market, core::UtilityFamily::Cara { alpha })
}

/// No-ambiguity benchmark for shifted power utility.
#[pyfunction]
fn merton_hara(market: &Market, beta: f64, a: f64) -> PyResult<Solution> {
    merton_with(market, core::UtilityFamily::Hara { beta, shift: a })
}

/// Nodes and weights of the probabilists' Gauss-Hermite rule, normalized to
/// integrate against the standard normal density.
#[pyfunction]
fn gauss_hermite(n: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let grid = core::numerics::gauss_hermite(n).map_err(err)?;
    Ok((grid.nodes().to_vec(), grid.weights().to_vec()))
}

fn discrete_prior(mus: Vec<f64>, probs: Vec<f64>) -> PyResult<core::DiscreteDriftPrior> {
    if mus.len() != probs.len() {
        return Err(PyValueError::new_err("mus and probs must have equal length"));
    }
    let points = mus
        .into_iter()
        .zip(probs)
        .map(|(mu, prob)| core::WeightedDrift { mu, prob })
        .collect();
    core::DiscreteDriftPrior::new(points).map_err(err)
}

/// Weighted expected-utility frontier for a two-drift prior under power
/// utility. Returns rows (lambda1, lambda2, m1, m2, kappa).
#[pyfunction]
#[pyo3(signature = (market, mus, probs, beta, grid_size=21, nodes=128))]
fn trace_frontier(
    market: &Market,
    mus: Vec<f64>,
    probs: Vec<f64>,
    beta: f64,
    grid_size: usize,
    nodes: usize,
) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let prior = discrete_prior(mus, probs)?;
    let family = core::UtilityFamily::Crra { beta };
    let points =
        core::trace_frontier(&market.inner, &prior, &family, grid_size, nodes).map_err(err)?;
    Ok(points
        .iter()
        .map(|pt| {
            (pt.lambda[0], pt.lambda[1], pt.expected_utilities[0], pt.expected_utilities[1], pt.kappa)
        })
        .collect())
}

/// Converged prior weights and criterion value for a finite drift prior.
#[pyclass(module = "smoothamb_py")]
struct FixedPoint {
    /// Converged prior weights ("lambda" is a Python keyword).
    #[pyo3(get)]
    weights: Vec<f64>,
    #[pyo3(get)]
    expected_utilities: Vec<f64>,
    #[pyo3(get)]
    phi_value: f64,
    #[pyo3(get)]
    kappa: f64,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    residual: f64,
}

#[pymethods]
impl FixedPoint {
    fn __repr__(&self) -> String {
        format!(
            "FixedPoint(weights={:?}, phi_value={}, iterations={})",
            self.weights, self.phi_value, self.iterations
        )
    }
}

/// Damped fixed-point iteration for the optimal prior weights under power
/// utility with a power ambiguity attitude.
#[pyfunction]
#[pyo3(signature = (market, mus, probs, gamma, beta, damping=0.5, tol=1e-10, max_iter=500, nodes=128))]
#[allow(clippy::too_many_arguments)]
fn fixed_point(
    market: &Market,
    mus: Vec<f64>,
    probs: Vec<f64>,
    gamma: f64,
    beta: f64,
    damping: f64,
    tol: f64,
    max_iter: usize,
    nodes: usize,
) -> PyResult<FixedPoint> {
    let prior = discrete_prior(mus, probs)?;
    let family = core::UtilityFamily::Crra { beta };
    let attitude = core::PowerAmbiguity::new(gamma, family.phi_branch()).map_err(err)?;
    let start =
        core::PriorWeights::normalized(&vec![1.0; prior.len()], &prior).map_err(err)?;
    let opts = core::FixedPointOptions { damping, tol, max_iter, nodes };
    let result =
        core::fixed_point_lambda(&market.inner, &prior, &family, &attitude, &start, &opts)
            .map_err(err)?;
    Ok(FixedPoint {
        weights: result.weights.lambda().to_vec(),
        expected_utilities: result.point.expected_utilities.clone(),
        phi_value: result.phi_value,
        kappa: result.point.kappa,
        iterations: result.iterations,
        residual: result.residual,
    })
}

#[pymodule]
fn smoothamb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Market>()?;
    m.add_class::<Solution>()?;
    m.add_class::<FixedPoint>()?;
    m.add_function(wrap_pyfunction!(solve_crra, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cara, m)?)?;
    m.add_function(wrap_pyfunction!(solve_hara, m)?)?;
    m.add_function(wrap_pyfunction!(merton_crra, m)?)?;
    m.add_function(wrap_pyfunction!(merton_cara, m)?)?;
    m.add_function(wrap_pyfunction!(merton_hara, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_hermite, m)?)?;
    m.add_function(wrap_pyfunction!(trace_frontier, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point, m)?)?;
    Ok(())
}
