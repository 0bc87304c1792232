//! Randomized invariants of the numerical and analytical building blocks.

use proptest::prelude::*;
use smoothamb::numerics::{
    find_root_monotone, gauss_hermite, gaussian_exp_quadratic, gaussian_quadratic_mean,
};
use smoothamb::{
    girsanov_density, solve_cara, solve_crra, GaussianDriftPrior, MarketParams, PhiBranch,
    PowerAmbiguity,
};

proptest! {
    /// The closed form for E[exp(a Z^2 + b Z + c)], Z ~ N(m, s2), agrees
    /// with brute-force quadrature wherever the expectation exists.
    #[test]
    fn exp_quadratic_matches_quadrature(
        a in -1.5f64..0.11,
        b in -2.0f64..2.0,
        c in -1.0f64..1.0,
        m in -2.0f64..2.0,
        s2 in 0.05f64..4.0,
    ) {
        prop_assume!(2.0 * a * s2 < 0.8);
        let exact = gaussian_exp_quadratic(a, b, c, m, s2).unwrap();
        let grid = gauss_hermite(256).unwrap();
        let s = s2.sqrt();
        let numeric = grid.integrate(|z| {
            let x = m + s * z;
            (a * x * x + b * x + c).exp()
        });
        prop_assert!(
            (exact - numeric).abs() <= 1e-7 * exact.abs().max(1.0),
            "{exact} vs {numeric}"
        );
    }

    /// Same agreement for the quadratic polynomial mean.
    #[test]
    fn quadratic_mean_matches_quadrature(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        c in -3.0f64..3.0,
        m in -2.0f64..2.0,
        s2 in 0.05f64..4.0,
    ) {
        let exact = gaussian_quadratic_mean(a, b, c, m, s2);
        let grid = gauss_hermite(64).unwrap();
        let s = s2.sqrt();
        let numeric = grid.integrate(|z| {
            let x = m + s * z;
            a * x * x + b * x + c
        });
        prop_assert!((exact - numeric).abs() <= 1e-10 * exact.abs().max(1.0));
    }

    /// phi and psi are convex conjugates: phi(x) <= x y + psi(y) with
    /// equality at y = phi'(x).
    #[test]
    fn attitude_conjugate_inequality(
        gamma in -3.0f64..0.99,
        x in 0.05f64..20.0,
        y in 0.05f64..20.0,
    ) {
        let attitude = PowerAmbiguity::new(gamma, PhiBranch::Positive).unwrap();
        let phi_x = attitude.phi(x).unwrap();
        prop_assert!(phi_x <= x * y + attitude.psi(y).unwrap() + 1e-9 * (1.0 + phi_x.abs()));
        let y_star = attitude.phi_prime(x).unwrap();
        let touched = x * y_star + attitude.psi(y_star).unwrap();
        prop_assert!((phi_x - touched).abs() <= 1e-9 * (1.0 + phi_x.abs()));
    }

    /// phi_prime_inv inverts phi_prime on the positive axis.
    #[test]
    fn marginal_attitude_inverts(
        gamma in -3.0f64..0.99,
        x in 1e-3f64..1e3,
    ) {
        let attitude = PowerAmbiguity::new(gamma, PhiBranch::Positive).unwrap();
        let y = attitude.phi_prime(x).unwrap();
        let back = attitude.phi_prime_inv(y).unwrap();
        prop_assert!((back - x).abs() <= 1e-9 * x);
    }

    /// Exponential-martingale identities for the change-of-measure density.
    #[test]
    fn girsanov_identities(
        theta in -2.0f64..2.0,
        w in -3.0f64..3.0,
        t in 0.1f64..9.0,
    ) {
        let d = girsanov_density(theta, w, t);
        prop_assert!(d > 0.0);
        // opposite kernels multiply to a deterministic factor
        let opposite = girsanov_density(-theta, w, t);
        prop_assert!((d * opposite - (-theta * theta * t).exp()).abs() <= 1e-12 * d * opposite);
        // unit mass under the reference law
        let grid = gauss_hermite(128).unwrap();
        let mass = grid.integrate(|z| girsanov_density(theta, t.sqrt() * z, t));
        prop_assert!((mass - 1.0).abs() <= 1e-9);
    }

    /// The shortest-round-trip float printing used by the CSV writers is
    /// lossless.
    #[test]
    fn float_display_round_trips(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let text = v.to_string();
        let back: f64 = text.parse().unwrap();
        prop_assert!(back == v || (back == 0.0 && v == 0.0));
    }

    /// Bisection lands on the root of a strictly monotone cubic.
    #[test]
    fn root_finding_on_monotone_cubics(
        root in -3.0f64..3.0,
        a in 0.1f64..2.0,
        cube in 0.0f64..1.0,
    ) {
        let f = |x: f64| cube * (x - root).powi(3) + a * (x - root);
        let found = find_root_monotone(f, root - 7.0, root + 11.0, 1e-13).unwrap();
        prop_assert!((found - root).abs() <= 1e-10 * root.abs().max(1.0));
    }

    /// On a region well inside every admissibility boundary the solvers
    /// must succeed, the power-utility curvature coefficient stays inside
    /// (0, beta), the exponential one inside (0, 1), and deeper ambiguity
    /// aversion flattens the curvature.
    #[test]
    fn curvature_coefficients_stay_admissible(
        gamma in -1.0f64..0.0,
        beta in 0.1f64..0.9,
        spread in 0.01f64..0.07,
    ) {
        let mp = MarketParams::new(0.1, 0.05, 0.2, 4.0, 1.0).unwrap();
        let prior = GaussianDriftPrior::new(mp.mu0, spread).unwrap();

        let crra = solve_crra(
            &mp,
            &prior,
            &PowerAmbiguity::new(gamma, PhiBranch::Positive).unwrap(),
            beta,
        )
        .unwrap();
        prop_assert!(crra.p() > 0.0 && crra.p() < beta);

        let cara = solve_cara(
            &mp,
            &prior,
            &PowerAmbiguity::new(gamma, PhiBranch::Negative).unwrap(),
            1.0,
        )
        .unwrap();
        prop_assert!(cara.p() > 0.0 && cara.p() < 1.0);

        let deeper = solve_crra(
            &mp,
            &prior,
            &PowerAmbiguity::new(gamma - 0.5, PhiBranch::Positive).unwrap(),
            beta,
        )
        .unwrap();
        prop_assert!(deeper.p() < crra.p());
    }
}
