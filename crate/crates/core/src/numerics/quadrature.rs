//! Gauss-Hermite quadrature in probabilists' normalization: an n-point grid
//! integrates polynomials of degree up to 2n-1 exactly against the standard
//! normal density. Node estimates come from the symmetric eigenproblem of
//! the Jacobi matrix (zero diagonal, off-diagonal sqrt(k)) and are polished
//! by Newton steps on the Hermite recurrence. Weights use the derivative
//! identity w = (n-1)! / (n He_{n-1}(x)^2), evaluated in log scale so that
//! far-tail weights keep full relative accuracy instead of the absolute
//! noise floor of eigenvector components; integrands growing like
//! exp(a z^2) would otherwise amplify that noise catastrophically.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const MAX_NODES: usize = 512;

/// Nodes and weights for expectations against N(0, 1). Weights sum to one;
/// nodes are symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    fn probabilists_hermite(n: usize) -> Self {
        if n == 1 {
            return QuadratureGrid { nodes: vec![0.0], weights: vec![1.0] };
        }
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut estimates: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        estimates.sort_by(|a, b| a.partial_cmp(b).unwrap());

        // log of (n-1)!/n, the numerator of the weight identity
        let log_norm: f64 =
            (1..n).map(|k| (k as f64).ln()).sum::<f64>() - (n as f64).ln();
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for x0 in estimates {
            let mut x = x0;
            for _ in 0..8 {
                let (hn, hnm1, _) = hermite_pair_scaled(n, x);
                let dx = hn / (n as f64 * hnm1);
                x -= dx;
                if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
                    break;
                }
            }
            let (_, hnm1, log_scale) = hermite_pair_scaled(n, x);
            let log_w = log_norm - 2.0 * (hnm1.abs().ln() + log_scale);
            nodes.push(x);
            weights.push(log_w.exp());
        }
        // enforce the exact +/- symmetry the computation only approximates
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -x;
            nodes[j] = x;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        QuadratureGrid { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of w_i f(z_i), approximating E[f(Z)] for Z ~ N(0, 1).
    ///
    /// Far-tail weights of large grids underflow to zero; those nodes are
    /// skipped so an integrand overflowing there cannot turn a vanishing
    /// contribution into 0 * inf = NaN.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }

    /// Like [`integrate`](Self::integrate) for integrands that can fail.
    pub fn try_integrate<F: Fn(f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            if w > 0.0 {
                acc += w * f(z)?;
            }
        }
        Ok(acc)
    }
}

/// He_n(x) and He_{n-1}(x) up to a common factor exp(log_scale), by the
/// three-term recurrence with periodic rescaling so intermediate values
/// never overflow. Their ratio (used by Newton) is scale-free; the scale is
/// needed to recover log |He_{n-1}| for the weight.
fn hermite_pair_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    const LIMIT: f64 = 1e150;
    const LOG_LIMIT: f64 = 345.38776394910684; // ln(1e150)
    debug_assert!(n >= 1);
    let mut prev = 1.0_f64; // He_{k-1}
    let mut cur = x; // He_k, starting at k = 1
    let mut log_scale = 0.0_f64;
    for k in 1..n {
        let next = x * cur - (k as f64) * prev;
        prev = cur;
        cur = next;
        if cur.abs().max(prev.abs()) > LIMIT {
            cur /= LIMIT;
            prev /= LIMIT;
            log_scale += LOG_LIMIT;
        }
    }
    (cur, prev, log_scale)
}

/// Returns the n-point grid, building and caching it on first use.
pub fn gauss_hermite(n: usize) -> Result<Arc<QuadratureGrid>> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::InvalidParameter(format!(
            "quadrature size must be in 1..={MAX_NODES}, got {n}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureGrid>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    if let Some(grid) = map.get(&n) {
        return Ok(Arc::clone(grid));
    }
    let grid = Arc::new(QuadratureGrid::probabilists_hermite(n));
    map.insert(n, Arc::clone(&grid));
    Ok(grid)
}

/// E[f(Z)] for Z ~ N(0, 1), with a node-doubling convergence check: the
/// values at n and 2n nodes must agree to `tol` in relative terms, otherwise
/// the integral is reported as not converged.
pub fn expect_standard_normal<F: Fn(f64) -> f64>(f: F, n: usize, tol: f64) -> Result<f64> {
    let coarse = gauss_hermite(n)?.integrate(&f);
    let fine = gauss_hermite(2 * n)?.integrate(&f);
    let change = (fine - coarse).abs() / (1.0 + fine.abs());
    if change <= tol && fine.is_finite() {
        Ok(fine)
    } else {
        Err(Error::QuadratureNotConverged { change })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_node_is_the_mean() {
        let g = gauss_hermite(1).unwrap();
        assert_eq!(g.nodes(), &[0.0]);
        assert_eq!(g.weights(), &[1.0]);
    }

    #[test]
    fn weights_sum_to_one() {
        for n in [1, 2, 3, 5, 8, 31, 64, 128, 256] {
            let g = gauss_hermite(n).unwrap();
            let total: f64 = g.weights().iter().sum();
            assert_relative_eq!(total, 1.0, max_relative = 1e-14);
            assert!(g.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn nodes_symmetric_and_sorted() {
        for n in [2, 3, 10, 11, 64] {
            let g = gauss_hermite(n).unwrap();
            let nodes = g.nodes();
            for i in 0..n / 2 {
                assert_eq!(nodes[i], -nodes[n - 1 - i]);
                assert_eq!(g.weights()[i], g.weights()[n - 1 - i]);
            }
            if n % 2 == 1 {
                assert_eq!(nodes[n / 2], 0.0);
            }
            for w in nodes.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn standard_normal_moments() {
        // E[Z^k] = 0 for odd k, (k-1)!! for even k
        let g = gauss_hermite(10).unwrap();
        let expected = [1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0, 0.0, 945.0];
        for (k, &m) in expected.iter().enumerate() {
            let got = g.integrate(|z| z.powi(k as i32));
            if m == 0.0 {
                assert!(got.abs() < 1e-12, "moment {k}: {got}");
            } else {
                assert_relative_eq!(got, m, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn exactness_degree_boundary() {
        // 3 nodes: exact through degree 5, not degree 6
        let g = gauss_hermite(3).unwrap();
        assert_relative_eq!(g.integrate(|z| z.powi(4)), 3.0, max_relative = 1e-12);
        assert!(g.integrate(|z| z.powi(5)).abs() < 1e-13);
        assert!((g.integrate(|z| z.powi(6)) - 15.0).abs() > 1.0);
    }

    #[test]
    fn exponential_moment() {
        let g = gauss_hermite(64).unwrap();
        for &t in &[-2.0, -0.5, 0.3, 1.0, 2.5] {
            assert_relative_eq!(
                g.integrate(|z| (t * z).exp()),
                (0.5 * t * t).exp(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn tail_weights_stay_clean_for_growing_integrands() {
        // E[exp(a Z^2)] = (1 - 2a)^{-1/2}; absolute noise in far-tail
        // weights would be amplified to garbage by this integrand
        let expected = (1.0 - 0.76f64).powf(-0.5);
        for n in [128, 256, 512] {
            let g = gauss_hermite(n).unwrap();
            let got = g.integrate(|z| (0.38 * z * z).exp());
            assert_relative_eq!(got, expected, max_relative = 1e-11);
        }
    }

    #[test]
    fn cache_returns_shared_grid() {
        let a = gauss_hermite(37).unwrap();
        let b = gauss_hermite(37).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(gauss_hermite(0).is_err());
        assert!(gauss_hermite(513).is_err());
        assert!(gauss_hermite(512).is_ok());
    }

    #[test]
    fn doubling_check_accepts_smooth_integrand() {
        let v = expect_standard_normal(|z| z.exp(), 64, 1e-10).unwrap();
        assert_relative_eq!(v, 0.5f64.exp(), max_relative = 1e-12);
    }

    #[test]
    fn doubling_check_flags_divergent_integrand() {
        // E[exp(0.6 Z^2)] is infinite; node doubling keeps growing
        let err = expect_standard_normal(|z| (0.6 * z * z).exp(), 64, 1e-8);
        assert!(matches!(err, Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn try_integrate_propagates_failure() {
        let g = gauss_hermite(8).unwrap();
        let out = g.try_integrate(|z| {
            if z > 1.0 {
                Err(Error::InvalidParameter("off grid".into()))
            } else {
                Ok(z)
            }
        });
        assert!(out.is_err());
        let ok = g.try_integrate(|z| Ok(z * z)).unwrap();
        assert_relative_eq!(ok, 1.0, max_relative = 1e-12);
    }
}
