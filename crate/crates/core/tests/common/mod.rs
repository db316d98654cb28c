#![allow(dead_code)]

use hyperboot::{count_distinct_infected_neighbors, Hypergraph, ModelParams};

/// Reference engine: every round recounts every uninfected vertex from
/// scratch and infects all that reach `r` at once.
pub fn naive_bootstrap(graph: &Hypergraph, initial: &[u32], r: u32) -> (Vec<u32>, usize) {
    let n = graph.n() as usize;
    let mut infected = vec![false; n];
    for &v in initial {
        infected[v as usize] = true;
    }
    let mut rounds = 0;
    loop {
        let ready: Vec<u32> = (0..graph.n())
            .filter(|&v| !infected[v as usize])
            .filter(|&v| count_distinct_infected_neighbors(graph, &infected, v).unwrap() >= r as usize)
            .collect();
        if ready.is_empty() {
            break;
        }
        for v in ready {
            infected[v as usize] = true;
        }
        rounds += 1;
    }
    let set = (0..graph.n()).filter(|&v| infected[v as usize]).collect();
    (set, rounds)
}

/// `p` giving an expected vertex degree of about `degree`.
pub fn p_for_degree(n: u32, k: u32, degree: f64) -> f64 {
    let ksets: f64 = (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product();
    (degree * n as f64 / k as f64 / ksets).min(1.0)
}

pub fn small_params(n: u32, k: u32, r: u32, degree: f64) -> ModelParams {
    ModelParams::new(n, k, r, p_for_degree(n, k, degree)).unwrap()
}
