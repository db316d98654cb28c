//! Bootstrap percolation on binomial random k-uniform hypergraphs.
//!
//! The crate is split into four layers:
//!
//! * [`hypermodel`]: model parameters, the critical size `b_{k,r}`, and sparse
//!   sampling of `H_k(n, p)` together with uniformly random initial sets.
//! * [`percolator`]: the synchronous r-neighbour bootstrap process on a
//!   concrete hypergraph.
//! * [`analytics`]: deterministic class-size recurrences, fixed-point
//!   classification and the subcritical Galton-Watson coupling.
//! * [`labrunner`]: seeded Monte Carlo sweeps, failure-decay scans and
//!   comparison of simulations against the recurrences.

pub mod analytics;
mod error;
pub mod hypermodel;
pub mod labrunner;
pub mod percolator;
pub mod rng;

pub use error::{Error, Result};

pub use analytics::{
    delta_diagnostics, empirical_critical_a, fixed_point_classify, gw_spec_from_state,
    gw_total_size, infection_multiplicity, trajectory_eq1, trajectory_eq2, CriticalEstimate,
    DeltaDiagnostics, GwEstimate, GwSpec, Recurrence, RegimeClassification, RegimeLabel,
    Trajectory,
};
pub use hypermodel::{
    sample_hypergraph, sample_initial_set, threshold_b, EdgeCountDraw, Hypergraph,
    HypergraphSampler, ModelParams, RegimeCheck, SampledHypergraph, Threshold, ThresholdRegime,
};
pub use labrunner::{
    compare_to_analytics, failure_decay_scan, run_sweep, run_trial, trial_seed, ComparisonReport,
    DecayTable, ExperimentConfig, ExperimentResult, OutcomeClass, TrialRecord,
};
pub use percolator::{count_distinct_infected_neighbors, run_bootstrap, InfectionState, PercolationOutcome};
