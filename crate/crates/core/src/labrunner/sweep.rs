use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hypermodel::{sample_initial_set, threshold_b, HypergraphSampler, ModelParams, DEFAULT_EDGE_BUDGET};
use crate::percolator::{run_bootstrap, PercolationOutcome};
use crate::rng::splitmix64;
use crate::{Error, Result};

/// Per-trial seed: `splitmix64(master ^ splitmix64(point ^ splitmix64(trial)))`.
///
/// Depends only on its arguments, so results do not depend on scheduling
/// or worker count.
pub fn trial_seed(master_seed: u64, point: usize, trial: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(point as u64 ^ splitmix64(trial as u64)))
}

/// Initial-set size for a grid value `x`: `ceil(x b)` clamped to `[0, n]`.
pub fn initial_size(a_over_b: f64, b: f64, n: u32) -> u64 {
    let target = a_over_b * b;
    // Absorb rounding noise so that e.g. (n / b) * b does not become n + 1.
    let a = (target - 1e-9 * target.abs().max(1.0)).ceil().max(0.0);
    (a as u64).min(n as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    /// Recorded for reference when `p` was given as `n^{-c}`.
    pub p_exponent: Option<f64>,
    pub a_over_b: Vec<f64>,
    pub trials_per_point: usize,
    pub master_seed: u64,
    /// Outcomes with at least `(1 - zeta) n` infected count as near full.
    pub near_full_fraction: f64,
    /// Outcomes with at most `C b` infected count as small.
    pub small_multiple: f64,
    pub epsilon: f64,
    pub snapshot: bool,
    pub edge_budget: f64,
}

impl ExperimentConfig {
    pub fn new(params: ModelParams, a_over_b: Vec<f64>, trials_per_point: usize, master_seed: u64) -> Self {
        Self {
            params,
            p_exponent: None,
            a_over_b,
            trials_per_point,
            master_seed,
            near_full_fraction: 0.1,
            small_multiple: 10.0,
            epsilon: 0.2,
            snapshot: false,
            edge_budget: DEFAULT_EDGE_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.a_over_b.is_empty() {
            return Err(Error::InvalidArgument("a/b grid is empty".into()));
        }
        if self.a_over_b.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::InvalidArgument("a/b grid values must be finite and >= 0".into()));
        }
        if self.trials_per_point == 0 {
            return Err(Error::InvalidArgument("trials per point must be at least 1".into()));
        }
        if !(self.near_full_fraction > 0.0 && self.near_full_fraction < 1.0) {
            return Err(Error::InvalidArgument("near-full fraction must lie in (0, 1)".into()));
        }
        if !(self.small_multiple > 0.0) {
            return Err(Error::InvalidArgument("small-outcome multiple must be positive".into()));
        }
        Ok(())
    }

    pub fn to_comment(&self) -> String {
        format!("config: {}", serde_json::to_string(self).expect("config serialises"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    Small,
    NearFull,
    Intermediate,
    /// The trial could not run (e.g. the sampler refused the memory budget).
    Failed,
}

impl OutcomeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeClass::Small => "small",
            OutcomeClass::NearFull => "near_full",
            OutcomeClass::Intermediate => "intermediate",
            OutcomeClass::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub point: usize,
    pub a_over_b: f64,
    pub a: u64,
    pub trial: usize,
    pub seed: u64,
    pub final_infected: usize,
    pub stopping_time: usize,
    pub class: OutcomeClass,
    /// Rounds between the infected count first exceeding `(n^{k-2} p)^{-1}`
    /// and termination.
    pub rounds_after_cutoff: Option<usize>,
    pub class_sizes: Option<Vec<Vec<usize>>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub point: usize,
    pub a_over_b: f64,
    pub a: u64,
    pub trials: usize,
    pub frac_small: f64,
    pub frac_near_full: f64,
    pub frac_intermediate: f64,
    pub frac_failed: f64,
    /// Mean final size over trials that ran.
    pub mean_final: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub b: f64,
    pub rows: Vec<TrialRecord>,
    pub points: Vec<PointSummary>,
}

/// One trial: sample `H_k(n, p)` and an `a`-subset with `seed`, then run the
/// process.
pub fn run_trial(params: &ModelParams, a: u64, seed: u64, snapshot: bool, edge_budget: f64) -> Result<PercolationOutcome> {
    let sampled = HypergraphSampler::new(edge_budget).sample(params, seed)?;
    let initial = sample_initial_set(params.n, a, seed)?;
    run_bootstrap(&sampled.graph, &initial, params.r, snapshot)
}

fn classify(final_infected: usize, config: &ExperimentConfig, b: f64) -> OutcomeClass {
    let n = config.params.n as f64;
    let f = final_infected as f64;
    if f >= (1.0 - config.near_full_fraction) * n {
        OutcomeClass::NearFull
    } else if f <= config.small_multiple * b {
        OutcomeClass::Small
    } else {
        OutcomeClass::Intermediate
    }
}

/// Runs every `(grid point, trial)` pair in parallel and aggregates per point.
pub fn run_sweep(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let params = config.params;
    let b = threshold_b(&params)?.value;
    let cutoff = params.validity_cutoff();
    let tasks: Vec<(usize, usize)> = (0..config.a_over_b.len())
        .flat_map(|point| (0..config.trials_per_point).map(move |trial| (point, trial)))
        .collect();

    let rows: Vec<TrialRecord> = tasks
        .into_par_iter()
        .map(|(point, trial)| {
            let a_over_b = config.a_over_b[point];
            let a = initial_size(a_over_b, b, params.n);
            let seed = trial_seed(config.master_seed, point, trial);
            let base = TrialRecord {
                point,
                a_over_b,
                a,
                trial,
                seed,
                final_infected: 0,
                stopping_time: 0,
                class: OutcomeClass::Failed,
                rounds_after_cutoff: None,
                class_sizes: None,
                error: None,
            };
            match run_trial(&params, a, seed, config.snapshot, config.edge_budget) {
                Ok(out) => TrialRecord {
                    final_infected: out.final_infected_count,
                    stopping_time: out.stopping_time,
                    class: classify(out.final_infected_count, config, b),
                    rounds_after_cutoff: out.rounds_after_exceeding(cutoff),
                    class_sizes: out.class_sizes,
                    ..base
                },
                Err(e) => TrialRecord { error: Some(e.to_string()), ..base },
            }
        })
        .collect();

    let points = summarize(config, b, &rows);
    Ok(ExperimentResult { config: config.clone(), b, rows, points })
}

fn summarize(config: &ExperimentConfig, b: f64, rows: &[TrialRecord]) -> Vec<PointSummary> {
    config
        .a_over_b
        .iter()
        .enumerate()
        .map(|(point, &a_over_b)| {
            let these: Vec<&TrialRecord> = rows.iter().filter(|r| r.point == point).collect();
            let total = these.len() as f64;
            let frac = |c: OutcomeClass| these.iter().filter(|r| r.class == c).count() as f64 / total;
            let ran: Vec<f64> = these
                .iter()
                .filter(|r| r.class != OutcomeClass::Failed)
                .map(|r| r.final_infected as f64)
                .collect();
            let (mean_final, std_error) = mean_and_se(&ran);
            PointSummary {
                point,
                a_over_b,
                a: initial_size(a_over_b, b, config.params.n),
                trials: these.len(),
                frac_small: frac(OutcomeClass::Small),
                frac_near_full: frac(OutcomeClass::NearFull),
                frac_intermediate: frac(OutcomeClass::Intermediate),
                frac_failed: frac(OutcomeClass::Failed),
                mean_final,
                std_error,
            }
        })
        .collect()
}

pub(crate) fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl ExperimentResult {
    /// Per-trial CSV: `point,a_over_b,a,trial,seed,final_infected,T,class`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}", self.config.to_comment())?;
        writeln!(w, "point,a_over_b,a,trial,seed,final_infected,T,class")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.point,
                r.a_over_b,
                r.a,
                r.trial,
                r.seed,
                r.final_infected,
                r.stopping_time,
                r.class.as_str()
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("utf-8")
    }

    /// Per-point aggregates as CSV.
    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}", self.config.to_comment())?;
        writeln!(w, "point,a_over_b,a,trials,frac_small,frac_near_full,frac_intermediate,frac_failed,mean_final,std_error")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                p.point,
                p.a_over_b,
                p.a,
                p.trials,
                p.frac_small,
                p.frac_near_full,
                p.frac_intermediate,
                p.frac_failed,
                p.mean_final,
                p.std_error
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypermodel::sample_hypergraph;

    fn small_config(grid: Vec<f64>, trials: usize) -> ExperimentConfig {
        let params = ModelParams::with_p_exponent(5000, 2, 2, 0.7).unwrap();
        ExperimentConfig::new(params, grid, trials, 99)
    }

    #[test]
    fn seed_mixing_is_stable_and_distinct() {
        assert_eq!(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
        let mut seeds: Vec<u64> = (0..4).flat_map(|p| (0..50).map(move |t| trial_seed(7, p, t))).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 200);
    }

    #[test]
    fn initial_size_rounding() {
        assert_eq!(initial_size(0.0, 66.0, 1000), 0);
        assert_eq!(initial_size(0.5, 16.666_666_666_666_67, 1000), 9);
        assert_eq!(initial_size(2.0, 16.666_666_666_666_67, 1000), 34);
        assert_eq!(initial_size(0.5, 66.0, 1000), 33);
        let b = 16.666_666_666_666_67;
        assert_eq!(initial_size(1000.0 / b, b, 1000), 1000);
    }

    #[test]
    fn zero_grid_is_all_small() {
        let res = run_sweep(&small_config(vec![0.0], 5)).unwrap();
        assert!(res.rows.iter().all(|r| r.class == OutcomeClass::Small && r.final_infected == 0));
        assert_eq!(res.points[0].frac_small, 1.0);
    }

    #[test]
    fn full_grid_is_all_near_full() {
        let cfg = small_config(vec![0.0], 1);
        let b = threshold_b(&cfg.params).unwrap().value;
        let res = run_sweep(&small_config(vec![5000.0 / b], 4)).unwrap();
        assert!(res.rows.iter().all(|r| r.class == OutcomeClass::NearFull && r.stopping_time == 0 && r.a == 5000));
    }

    #[test]
    fn fractions_sum_to_one() {
        let res = run_sweep(&small_config(vec![0.3, 1.0, 3.0], 6)).unwrap();
        for p in &res.points {
            let s = p.frac_small + p.frac_near_full + p.frac_intermediate + p.frac_failed;
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_trial_matches_direct_composition() {
        let cfg = small_config(vec![1.5], 1);
        let res = run_sweep(&cfg).unwrap();
        let row = &res.rows[0];
        let seed = trial_seed(cfg.master_seed, 0, 0);
        assert_eq!(row.seed, seed);
        let g = sample_hypergraph(&cfg.params, seed).unwrap().graph;
        let init = sample_initial_set(cfg.params.n, row.a, seed).unwrap();
        let out = run_bootstrap(&g, &init, cfg.params.r, false).unwrap();
        assert_eq!(row.final_infected, out.final_infected_count);
        assert_eq!(row.stopping_time, out.stopping_time);
    }

    #[test]
    fn memory_rejections_become_failed_rows() {
        let mut cfg = small_config(vec![0.5, 2.0], 3);
        cfg.edge_budget = 10.0;
        let res = run_sweep(&cfg).unwrap();
        assert!(res.rows.iter().all(|r| r.class == OutcomeClass::Failed && r.error.is_some()));
        assert_eq!(res.points[0].frac_failed, 1.0);
    }

    #[test]
    fn csv_is_reproducible() {
        let cfg = small_config(vec![0.5, 2.0], 4);
        let a = run_sweep(&cfg).unwrap().to_csv();
        let b = run_sweep(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert!(lines.next().unwrap().starts_with("# config: {"));
        assert_eq!(lines.next().unwrap(), "point,a_over_b,a,trial,seed,final_infected,T,class");
        assert_eq!(a.lines().count(), 2 + 8);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(run_sweep(&small_config(vec![], 1)).is_err());
        assert!(run_sweep(&small_config(vec![1.0], 0)).is_err());
        let mut cfg = small_config(vec![1.0], 1);
        cfg.near_full_fraction = 1.0;
        assert!(run_sweep(&cfg).is_err());
    }
}
