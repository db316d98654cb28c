//! Model parameters, the critical initial-set size and sampling of `H_k(n, p)`.

mod graph;
mod params;
mod sample;

pub use graph::Hypergraph;
pub use params::{threshold_b, ModelParams, RegimeCheck, Threshold, ThresholdRegime};
pub use sample::{
    sample_hypergraph, sample_initial_set, EdgeCountDraw, HypergraphSampler, SampledHypergraph,
    DEFAULT_EDGE_BUDGET,
};

pub(crate) use params::factorial_f64;
