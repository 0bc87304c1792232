use thiserror::Error;

/// Crate-wide error type. Variants are grouped by how the CLI maps them to
/// exit codes: invalid inputs and configs are validation errors, everything
/// else is a numerical failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("phi domain: argument {arg} outside the {branch} branch domain")]
    PhiDomain { arg: f64, branch: &'static str },

    #[error("no-ambiguity limit: sigma_mu = 0 has no finite precision parameter")]
    NoAmbiguityLimit,

    #[error("quadrature not converged: relative change {change:.3e} after node doubling")]
    QuadratureNotConverged { change: f64 },

    #[error("exp-quadratic moment divergent: 2*a*s2 = {factor} >= 1")]
    MomentDivergent { factor: f64 },

    #[error("not bracketed: f({lo}) and f({hi}) have the same sign")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("kappa not bracketed: budget map never crosses the target")]
    KappaNotBracketed,

    #[error("no real root: discriminant {discriminant} < 0")]
    NoRealRoot { discriminant: f64 },

    #[error("solution invalid: {0}")]
    SolutionInvalid(String),

    #[error("feedback map singular: p = {p} reaches the time-decay bound beta = {beta}")]
    FeedbackMapSingular { p: f64, beta: f64 },

    #[error("prior integral divergent: outer expectation fails the node-doubling check")]
    PriorIntegralDivergent,

    #[error("fixed point not converged: residual {residual:.3e} after {iterations} iterations")]
    FixedPointNotConverged { residual: f64, iterations: usize },

    #[error("path blow-up: non-finite wealth on path {path}")]
    PathBlowUp { path: u64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidConfig(_)
                | Error::PhiDomain { .. }
                | Error::NoAmbiguityLimit
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
