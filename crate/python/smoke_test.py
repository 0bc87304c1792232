"""Smoke test for the smoothamb_py extension module.

Build the module and stage it next to this file first:

    cargo build -p smoothamb-py --release
    cp target/release/libsmoothamb_py.so python/smoothamb_py.so

then run `python3 python/smoke_test.py`.
"""

import math
import sys

import smoothamb_py as sa


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    market = sa.Market(mu0=0.1, r=0.05, sigma=0.2, horizon=4.0, x0=1.0)
    approx(market.nu, 0.25, 1e-15)

    beta = 1.0 / 3.0
    sol = sa.solve_crra(market, gamma=-0.5, sigma_mu=0.05, beta=beta)
    assert sol.family == "crra"
    approx(sol.p / (2.0 * market.horizon * beta), 0.0363, 5e-4)
    approx(sol.q / beta, 0.3230, 5e-4)
    assert abs(sol.budget_residual()) < 1e-10
    assert not sol.warnings

    merton = sa.merton_crra(market, beta)
    approx(merton.initial_strategy(), 1.875, 1e-9)
    assert sol.initial_strategy() < merton.initial_strategy()

    # the optimal terminal wealth is an exponential quadratic; check one point
    w = 0.7
    expected = math.exp((sol.p / (2 * market.horizon) * w * w + sol.q * w + sol.c) / beta)
    approx(sol.terminal_wealth(w), expected, 1e-12)

    # wealth and strategy feedback stay consistent along the diagonal
    x = sol.wealth(2.0, 0.3)
    assert x > 0.0
    assert sol.strategy(2.0, 0.3, x) > 0.0

    # expected utility under the point estimate is dominated by the benchmark
    assert sol.expected_utility(market.mu0) < merton.expected_utility(market.mu0)
    # but wins in the tails, which is the whole point of hedging ambiguity
    assert sol.expected_utility(-0.2) > merton.expected_utility(-0.2)

    # exponential and shifted families round-trip through the same surface
    cara = sa.solve_cara(market, gamma=-0.5, sigma_mu=0.05, alpha=1.0)
    approx(cara.p, 0.21103222500738017, 1e-12)
    hara = sa.solve_hara(market, gamma=-0.5, sigma_mu=0.05, beta=beta, a=0.2)
    assert abs(hara.budget_residual()) < 1e-10

    nodes, weights = sa.gauss_hermite(64)
    assert len(nodes) == 64
    approx(sum(weights), 1.0, 1e-12)
    approx(sum(w * z * z for z, w in zip(nodes, weights)), 1.0, 1e-10)

    frontier = sa.trace_frontier(
        market, mus=[0.15, 0.09], probs=[2 / 3, 1 / 3], beta=beta, grid_size=9
    )
    assert len(frontier) == 9
    m1 = [row[2] for row in frontier]
    m2 = [row[3] for row in frontier]
    assert all(a < b for a, b in zip(m1, m1[1:]))
    assert all(a > b for a, b in zip(m2, m2[1:]))

    fp = sa.fixed_point(market, mus=[0.15, 0.09], probs=[2 / 3, 1 / 3], gamma=-0.5, beta=beta)
    approx(fp.weights[0], 0.87744125, 5e-7)
    approx(fp.weights[1], 1.24511751, 5e-7)
    approx(fp.phi_value, -1.0321809173947798, 1e-9)
    assert fp.residual < 1e-10
    # the converged weights average to one under the prior
    approx(fp.weights[0] * 2 / 3 + fp.weights[1] * 1 / 3, 1.0, 1e-12)

    # invalid parameters surface as ValueError, not panics
    try:
        sa.solve_crra(market, gamma=-0.5, sigma_mu=0.05, beta=1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("beta=1.5 must be rejected")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
