//! Config-driven experiment front end.
//!
//! Experiments read a strict JSON config (unknown keys are rejected), apply
//! command line overrides, and write their artifacts into the configured
//! output directory. All randomness is seeded, so a repeated invocation with
//! the same config and seed reproduces every artifact byte for byte.

mod config;
mod run;

pub use config::{
    AmbiguityConfig, CompareConfig, ExperimentConfig, ExperimentKind, FixedPointConfig,
    FrontierConfig, NumericsConfig, OutputConfig, OutputFormat, Overrides, SodConfig,
    SweepConfig, SweepParameter,
};
pub use run::{execute, run_experiment, Outcome};
