//! Fixtures shared by the benchmarks.

use hyperboot::{sample_hypergraph, sample_initial_set, threshold_b, Hypergraph, ModelParams};

/// Graph case at `p = n^{-0.7}`.
pub fn graph_params(n: u32) -> ModelParams {
    ModelParams::with_p_exponent(n, 2, 2, 0.7).expect("valid parameters")
}

/// 3-uniform case at `p = n^{-1.7}`.
pub fn hyper_params(n: u32) -> ModelParams {
    ModelParams::with_p_exponent(n, 3, 2, 1.7).expect("valid parameters")
}

/// A sampled hypergraph with an initial set of `a_over_b * b` vertices.
pub fn instance(params: &ModelParams, a_over_b: f64, seed: u64) -> (Hypergraph, Vec<u32>) {
    let graph = sample_hypergraph(params, seed).expect("sampling succeeds").graph;
    let b = threshold_b(params).expect("p > 0").value;
    let a = ((a_over_b * b).ceil() as u64).min(params.n as u64);
    let initial = sample_initial_set(params.n, a, seed).expect("a <= n");
    (graph, initial)
}
