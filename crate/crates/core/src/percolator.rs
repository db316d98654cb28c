//! Synchronous r-neighbour bootstrap percolation on a hypergraph.
//!
//! Two vertices are neighbours when some edge contains both. In every round
//! each uninfected vertex with at least `r` distinct infected neighbours
//! becomes infected; infection is permanent and the process stops after the
//! first round that infects nobody.

use serde::{Deserialize, Serialize};

use crate::hypermodel::Hypergraph;
use crate::{Error, Result};

/// Result of one run of the process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PercolationOutcome {
    #[serde(rename = "final_infected")]
    pub final_infected_count: usize,
    #[serde(rename = "T")]
    pub stopping_time: usize,
    /// New infections in rounds `1..=T`; never ends in a zero.
    #[serde(rename = "rounds")]
    pub new_infections: Vec<usize>,
    /// `(|A_0(t)|, ..., |A_r(t)|)` for `t = 0..=T` when snapshots were requested.
    #[serde(rename = "class_sizes", skip_serializing_if = "Option::is_none", default)]
    pub class_sizes: Option<Vec<Vec<usize>>>,
    #[serde(skip)]
    pub initial_infected: usize,
    /// The final infected set, sorted.
    #[serde(skip)]
    pub infected: Vec<u32>,
}

impl PercolationOutcome {
    /// Infected count after round `t` (clamped to `T`).
    pub fn infected_after(&self, t: usize) -> usize {
        self.initial_infected + self.new_infections.iter().take(t).sum::<usize>()
    }

    /// Rounds between the first time the infected count exceeds `level`
    /// and termination, or `None` if it never does.
    pub fn rounds_after_exceeding(&self, level: f64) -> Option<usize> {
        let mut count = self.initial_infected;
        if count as f64 > level {
            return Some(self.stopping_time);
        }
        for (i, &new) in self.new_infections.iter().enumerate() {
            count += new;
            if count as f64 > level {
                return Some(self.stopping_time - (i + 1));
            }
        }
        None
    }
}

/// Incremental engine state.
///
/// `counts[v]` is the number of distinct infected neighbours recorded for
/// `v`, saturating at `r`. The ids already counted for `v` live in
/// `seen[v * r .. v * r + counts[v]]`.
#[derive(Debug, Clone)]
pub struct InfectionState<'g> {
    graph: &'g Hypergraph,
    r: usize,
    infected: Vec<bool>,
    counts: Vec<u32>,
    seen: Vec<u32>,
    infected_total: usize,
    round: usize,
}

impl<'g> InfectionState<'g> {
    pub fn new(graph: &'g Hypergraph, r: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("infection threshold must be at least 1".into()));
        }
        let n = graph.n() as usize;
        Ok(Self {
            graph,
            r: r as usize,
            infected: vec![false; n],
            counts: vec![0; n],
            seen: vec![0; n * r as usize],
            infected_total: 0,
            round: 0,
        })
    }

    pub fn is_infected(&self, v: u32) -> bool {
        self.infected[v as usize]
    }

    pub fn infected_count(&self) -> usize {
        self.infected_total
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Recorded distinct infected-neighbour count of `v`, capped at `r`.
    pub fn neighbor_count(&self, v: u32) -> usize {
        self.counts[v as usize] as usize
    }

    fn mark(&mut self, v: u32) {
        if !self.infected[v as usize] {
            self.infected[v as usize] = true;
            self.infected_total += 1;
        }
    }

    /// Propagates the effect of the vertices infected in the last round and
    /// returns the uninfected vertices that now reach the threshold.
    fn propagate(&mut self, frontier: &[u32]) -> Vec<u32> {
        let graph = self.graph;
        let r = self.r;
        let mut ready = Vec::new();
        for &u in frontier {
            for &e in graph.incident_edges(u) {
                for &w in graph.edge(e as usize) {
                    let wi = w as usize;
                    if w == u || self.infected[wi] {
                        continue;
                    }
                    let c = self.counts[wi] as usize;
                    if c >= r {
                        continue;
                    }
                    let slots = &mut self.seen[wi * r..wi * r + r];
                    if slots[..c].contains(&u) {
                        continue;
                    }
                    slots[c] = u;
                    self.counts[wi] += 1;
                    if c + 1 == r {
                        ready.push(w);
                    }
                }
            }
        }
        ready
    }

    /// `(|A_0|, ..., |A_{r-1}|, |A_r|)`: uninfected vertices by neighbour
    /// count, then the infected count.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.r + 1];
        for (v, &inf) in self.infected.iter().enumerate() {
            if inf {
                sizes[self.r] += 1;
            } else {
                sizes[(self.counts[v] as usize).min(self.r)] += 1;
            }
        }
        sizes
    }
}

/// Runs the synchronous process from `initial` with threshold `r`.
///
/// Round `t + 1` infects exactly the uninfected vertices having at least `r`
/// distinct infected neighbours at the end of round `t`. Class snapshots
/// for round `t` classify uninfected vertices by their infected neighbours
/// in `A_r(t-1)`.
pub fn run_bootstrap(
    graph: &Hypergraph,
    initial: &[u32],
    r: u32,
    snapshot: bool,
) -> Result<PercolationOutcome> {
    let n = graph.n();
    if let Some(&v) = initial.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v as u64, n });
    }
    let mut state = InfectionState::new(graph, r)?;
    let mut frontier: Vec<u32> = Vec::with_capacity(initial.len());
    for &v in initial {
        if !state.is_infected(v) {
            state.mark(v);
            frontier.push(v);
        }
    }
    let initial_infected = state.infected_count();
    let mut snapshots = snapshot.then(|| vec![state.class_sizes()]);
    let mut new_infections = Vec::new();

    loop {
        let ready = state.propagate(&frontier);
        if ready.is_empty() {
            break;
        }
        for &v in &ready {
            state.mark(v);
        }
        state.round += 1;
        new_infections.push(ready.len());
        if let Some(s) = snapshots.as_mut() {
            s.push(state.class_sizes());
        }
        frontier = ready;
    }

    let infected: Vec<u32> = (0..n).filter(|&v| state.is_infected(v)).collect();
    Ok(PercolationOutcome {
        final_infected_count: state.infected_count(),
        stopping_time: new_infections.len(),
        new_infections,
        class_sizes: snapshots,
        initial_infected,
        infected,
    })
}

/// Number of distinct infected vertices `u != v` sharing an edge with `v`,
/// computed directly from the incidence lists.
pub fn count_distinct_infected_neighbors(graph: &Hypergraph, infected: &[bool], v: u32) -> Result<usize> {
    let n = graph.n();
    if v >= n {
        return Err(Error::VertexOutOfRange { vertex: v as u64, n });
    }
    if infected.len() != n as usize {
        return Err(Error::InvalidArgument(format!(
            "infected flags have length {}, expected {n}",
            infected.len()
        )));
    }
    let mut found: Vec<u32> = graph
        .incident_edges(v)
        .iter()
        .flat_map(|&e| graph.edge(e as usize).iter().copied())
        .filter(|&u| u != v && infected[u as usize])
        .collect();
    found.sort_unstable();
    found.dedup();
    Ok(found.len())
}
