//! Strict JSON configuration for the experiment runner.
//!
//! Unknown keys are rejected everywhere so a typo cannot silently fall back
//! to a default. Section defaults encode the standard example parameters
//! (mu0 = 0.1, r = 0.05, sigma = 0.2, T = 4, x = 1, sigma_mu = 0.05,
//! beta = 1/3, gamma = -0.5), so an empty document, or no config at all,
//! reproduces the headline numbers.

use crate::ambiguity::{DiscreteDriftPrior, GaussianDriftPrior, PowerAmbiguity, WeightedDrift};
use crate::closed_form::UtilityFamily;
use crate::error::{Error, Result};
use crate::market::MarketParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// The experiments the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Frontier,
    FixedPoint,
    Compare,
    Sweep,
    Verify,
}

/// Prior over the stock drift: Gaussian around the point estimate, or a
/// finite list of candidate drifts with probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SodConfig {
    Gaussian { sigma_mu: f64 },
    Discrete { points: Vec<WeightedDrift> },
}

/// Ambiguity attitude exponent and the prior it averages over. The attitude
/// branch is not configured: it follows from the sign of the utility family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbiguityConfig {
    pub gamma: f64,
    pub sod: SodConfig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierConfig {
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
}

impl Default for FrontierConfig {
    fn default() -> Self {
        FrontierConfig { grid_size: default_grid_size() }
    }
}

fn default_grid_size() -> usize {
    21
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointConfig {
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_fp_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            damping: default_damping(),
            tol: default_fp_tol(),
            max_iter: default_max_iter(),
        }
    }
}

fn default_damping() -> f64 {
    0.5
}

fn default_fp_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    500
}

/// Grids for the comparison curves. The default ranges are conventions of
/// this tool, not sourced values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default = "default_mu_grid")]
    pub mu_grid: Vec<f64>,
    #[serde(default = "default_sigma_mu_grid")]
    pub sigma_mu_grid: Vec<f64>,
    #[serde(default = "default_w_grid")]
    pub w_grid: Vec<f64>,
    /// Evaluation time for the feedback columns; defaults to half the horizon.
    #[serde(default)]
    pub t_eval: Option<f64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            mu_grid: default_mu_grid(),
            sigma_mu_grid: default_sigma_mu_grid(),
            w_grid: default_w_grid(),
            t_eval: None,
        }
    }
}

fn default_mu_grid() -> Vec<f64> {
    linspace(0.02, 0.18, 41)
}

fn default_sigma_mu_grid() -> Vec<f64> {
    linspace(0.0, 0.1, 21)
}

fn default_w_grid() -> Vec<f64> {
    linspace(-2.0, 2.0, 41)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Gamma,
    Beta,
    SigmaMu,
}

impl SweepParameter {
    pub fn file_stem(self) -> &'static str {
        match self {
            SweepParameter::Gamma => "gamma",
            SweepParameter::Beta => "beta",
            SweepParameter::SigmaMu => "sigma_mu",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_sweep_parameter")]
    pub parameter: SweepParameter,
    /// Grid of parameter values; a per-parameter default when omitted.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    /// Attitude exponents for sigma_mu sweeps, one output series per value.
    #[serde(default)]
    pub gammas: Option<Vec<f64>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { parameter: default_sweep_parameter(), grid: None, gammas: None }
    }
}

fn default_sweep_parameter() -> SweepParameter {
    SweepParameter::Gamma
}

impl SweepConfig {
    /// The grid actually swept. The default gamma grid ends at 1 - 1e-9
    /// because the attitude family is only defined below one.
    pub fn effective_grid(&self) -> Vec<f64> {
        if let Some(grid) = &self.grid {
            return grid.clone();
        }
        match self.parameter {
            SweepParameter::Gamma => {
                let mut grid = linspace(-3.0, 1.0, 41);
                *grid.last_mut().expect("nonempty by construction") = 1.0 - 1e-9;
                grid
            }
            SweepParameter::Beta => linspace(0.05, 0.9, 18),
            SweepParameter::SigmaMu => linspace(0.0, 0.1, 21),
        }
    }

    pub fn effective_gammas(&self) -> Vec<f64> {
        self.gammas.clone().unwrap_or_else(|| vec![-0.5, 0.0, 0.5])
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    /// Gauss-Hermite node count; doubled internally by convergence checks,
    /// so at most 256.
    #[serde(default = "default_gh_nodes")]
    pub gh_nodes: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_mc_paths")]
    pub mc_paths: u64,
    /// Finest Monte Carlo step count; must be a positive multiple of 4.
    #[serde(default = "default_mc_steps")]
    pub mc_steps: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            gh_nodes: default_gh_nodes(),
            seed: default_seed(),
            mc_paths: default_mc_paths(),
            mc_steps: default_mc_steps(),
        }
    }
}

fn default_gh_nodes() -> usize {
    128
}

fn default_seed() -> u64 {
    20240817
}

fn default_mc_paths() -> u64 {
    1000
}

fn default_mc_steps() -> usize {
    1024
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// Comma-separated tables with a header row (the default).
    #[default]
    Csv,
    /// The same tables as JSON arrays of row objects.
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    /// Format of tabular outputs; report-style outputs are always JSON.
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: default_directory(), format: OutputFormat::Csv }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from(".")
}

/// Command line overrides applied on top of the loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub gh_nodes: Option<usize>,
    pub out: Option<PathBuf>,
}

/// One experiment description. Every section is optional in the JSON
/// document; a section that is present must be complete.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_market")]
    pub market: MarketParams,
    #[serde(default = "default_ambiguity")]
    pub ambiguity: AmbiguityConfig,
    #[serde(default = "default_utility")]
    pub utility: UtilityFamily,
    /// Informational label; the subcommand decides what actually runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default)]
    pub frontier: FrontierConfig,
    #[serde(default)]
    pub fixed_point: FixedPointConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_market() -> MarketParams {
    MarketParams { mu0: 0.1, r: 0.05, sigma: 0.2, horizon: 4.0, x0: 1.0 }
}

fn default_ambiguity() -> AmbiguityConfig {
    AmbiguityConfig { gamma: -0.5, sod: SodConfig::Gaussian { sigma_mu: 0.05 } }
}

fn default_utility() -> UtilityFamily {
    UtilityFamily::Crra { beta: 1.0 / 3.0 }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            market: default_market(),
            ambiguity: default_ambiguity(),
            utility: default_utility(),
            experiment: None,
            frontier: FrontierConfig::default(),
            fixed_point: FixedPointConfig::default(),
            compare: CompareConfig::default(),
            sweep: SweepConfig::default(),
            numerics: NumericsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.numerics.seed = seed;
        }
        if let Some(nodes) = overrides.gh_nodes {
            self.numerics.gh_nodes = nodes;
        }
        if let Some(out) = &overrides.out {
            self.output.directory = out.clone();
        }
    }

    /// Full validation of every section, before any computation. Sections an
    /// experiment does not use are still checked, so a config cannot carry
    /// latent mistakes.
    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        self.utility.validate()?;
        self.attitude()?;
        match &self.ambiguity.sod {
            SodConfig::Gaussian { sigma_mu } => {
                GaussianDriftPrior::new(self.market.mu0, *sigma_mu)?;
            }
            SodConfig::Discrete { points } => {
                DiscreteDriftPrior::new(points.clone())?;
            }
        }

        if self.frontier.grid_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "frontier.grid_size must be at least 2, got {}",
                self.frontier.grid_size
            )));
        }

        let fp = &self.fixed_point;
        if !(fp.damping > 0.0 && fp.damping <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fixed_point.damping must lie in (0, 1], got {}",
                fp.damping
            )));
        }
        if !(fp.tol > 0.0) || fp.max_iter == 0 {
            return Err(Error::InvalidConfig(
                "fixed_point needs tol > 0 and max_iter >= 1".into(),
            ));
        }

        check_grid("compare.mu_grid", &self.compare.mu_grid)?;
        check_grid("compare.sigma_mu_grid", &self.compare.sigma_mu_grid)?;
        check_grid("compare.w_grid", &self.compare.w_grid)?;
        if self.compare.sigma_mu_grid.iter().any(|&s| s < 0.0) {
            return Err(Error::InvalidConfig(
                "compare.sigma_mu_grid values must be >= 0".into(),
            ));
        }
        if let Some(t) = self.compare.t_eval {
            if !t.is_finite() || t < 0.0 || t > self.market.horizon {
                return Err(Error::InvalidConfig(format!(
                    "compare.t_eval must lie in [0, {}], got {t}",
                    self.market.horizon
                )));
            }
        }

        if let Some(grid) = &self.sweep.grid {
            check_grid("sweep.grid", grid)?;
            match self.sweep.parameter {
                SweepParameter::Gamma => {
                    if grid.iter().any(|&g| g >= 1.0) {
                        return Err(Error::InvalidConfig(
                            "sweep.grid gamma values must be < 1".into(),
                        ));
                    }
                }
                SweepParameter::Beta => {
                    if grid.iter().any(|&b| b <= 0.0 || b >= 1.0) {
                        return Err(Error::InvalidConfig(
                            "sweep.grid beta values must lie in (0, 1)".into(),
                        ));
                    }
                }
                SweepParameter::SigmaMu => {
                    if grid.iter().any(|&s| s < 0.0) {
                        return Err(Error::InvalidConfig(
                            "sweep.grid sigma_mu values must be >= 0".into(),
                        ));
                    }
                }
            }
        }
        if let Some(gammas) = &self.sweep.gammas {
            check_grid("sweep.gammas", gammas)?;
            if gammas.iter().any(|&g| g >= 1.0) {
                return Err(Error::InvalidConfig("sweep.gammas values must be < 1".into()));
            }
        }

        let num = &self.numerics;
        if num.gh_nodes == 0 || num.gh_nodes > 256 {
            return Err(Error::InvalidConfig(format!(
                "numerics.gh_nodes must lie in 1..=256, got {}",
                num.gh_nodes
            )));
        }
        if num.mc_paths == 0 {
            return Err(Error::InvalidConfig("numerics.mc_paths must be >= 1".into()));
        }
        if num.mc_steps < 4 || num.mc_steps % 4 != 0 {
            return Err(Error::InvalidConfig(format!(
                "numerics.mc_steps must be a multiple of 4 and at least 4, got {}",
                num.mc_steps
            )));
        }
        Ok(())
    }

    /// The attitude paired with the configured utility: the exponent comes
    /// from the config, the branch from the utility's sign.
    pub fn attitude(&self) -> Result<PowerAmbiguity> {
        PowerAmbiguity::new(self.ambiguity.gamma, self.utility.phi_branch())
    }

    /// The Gaussian prior, for experiments that need one.
    pub fn gaussian_prior(&self) -> Result<GaussianDriftPrior> {
        match &self.ambiguity.sod {
            SodConfig::Gaussian { sigma_mu } => {
                GaussianDriftPrior::new(self.market.mu0, *sigma_mu)
            }
            SodConfig::Discrete { .. } => Err(Error::InvalidConfig(
                "this experiment needs a gaussian prior (ambiguity.sod.kind = \"gaussian\")"
                    .into(),
            )),
        }
    }

    /// The discrete prior, for experiments that need one.
    pub fn discrete_prior(&self) -> Result<DiscreteDriftPrior> {
        match &self.ambiguity.sod {
            SodConfig::Discrete { points } => DiscreteDriftPrior::new(points.clone()),
            SodConfig::Gaussian { .. } => Err(Error::InvalidConfig(
                "this experiment needs a discrete prior (ambiguity.sod.kind = \"discrete\")"
                    .into(),
            )),
        }
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig(format!("{name} must not be empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(format!("{name} values must be finite")));
    }
    Ok(())
}
