//! Optimal investment under smooth ambiguity about the stock drift.
//!
//! A single investor trades a riskless bond and one stock over a fixed
//! horizon. The stock's volatility is known but its drift is not: a prior
//! (Gaussian or finitely supported) describes the candidate drifts, and the
//! investor ranks terminal wealths by a smooth ambiguity criterion, applying
//! a concave attitude function to the per-drift expected utilities before
//! averaging over the prior.
//!
//! The crate provides
//! * closed-form optimal terminal wealths, wealth processes, and trading
//!   strategies for exponential, power, and shifted power utility under a
//!   Gaussian drift prior ([`closed_form`]),
//! * the weighted expected-utility frontier and the fixed-point
//!   characterization of the optimum for finitely many candidate drifts
//!   ([`frontier`]),
//! * supporting numerics: Gauss-Hermite quadrature, Gaussian moment
//!   identities, root finding, and Monte Carlo replication checks
//!   ([`numerics`]),
//! * a command line driver for the standard experiments ([`cli`]).

pub mod ambiguity;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod frontier;
pub mod market;
pub mod numerics;

pub use ambiguity::{
    DiscreteDriftPrior, GaussianDriftPrior, PhiBranch, PowerAmbiguity, PriorWeights,
    WeightedDrift,
};
pub use closed_form::{
    solve, solve_cara, solve_crra, solve_hara, ClosedFormSolution, MertonBaseline, UtilityFamily,
};
pub use error::{Error, Result};
pub use frontier::{
    fixed_point_lambda, mixture_density, separability_check, solve_weighted_eut, trace_frontier,
    FixedPointOptions, FixedPointResult, FrontierPoint, SeparabilityReport,
};
pub use market::{girsanov_density, MarketParams};
