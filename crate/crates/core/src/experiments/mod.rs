//! Random instances, convergence-rate measurement and reproducible batch suites.

mod continuity;
mod instances;
mod rate;
mod suite;

pub use continuity::perturbation_continuity_check;
pub use instances::{
    jordan_block, random_diagonalizable, random_diagonalizable_with, spectrum_distance, Instance, SpectrumSpec,
};
pub use rate::{polish_limit, rate_estimate, RateReport, DEFAULT_RATE_SLACK};
pub use suite::{run_suite, run_trials, trial_seed, SuiteConfig, SuiteSummary, TrialKind, TrialRecord};
