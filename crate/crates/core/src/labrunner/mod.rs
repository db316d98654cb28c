//! Seeded Monte Carlo experiments on top of the sampler and the engine.

mod compare;
mod decay;
mod sweep;

pub use compare::{compare_to_analytics, ComparisonReport, PointComparison};
pub use decay::{failure_decay_scan, DecayRow, DecayTable};
pub use sweep::{
    initial_size, run_sweep, run_trial, trial_seed, ExperimentConfig, ExperimentResult, OutcomeClass,
    PointSummary, TrialRecord,
};
