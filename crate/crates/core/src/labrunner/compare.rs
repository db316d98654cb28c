use serde::{Deserialize, Serialize};

use super::sweep::{mean_and_se, ExperimentResult, OutcomeClass};
use crate::analytics::{fixed_point_classify, RegimeLabel};
use crate::hypermodel::ModelParams;
use crate::Result;

/// Simulation versus recurrence for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointComparison {
    pub point: usize,
    pub a_over_b: f64,
    pub a: u64,
    pub predicted: RegimeLabel,
    pub a_star: Option<f64>,
    pub empirical_mean_final: f64,
    pub empirical_std_error: f64,
    /// `|mean - a*| / a*` for subcritical points (0 when both are 0).
    pub relative_error: Option<f64>,
    /// Per-trial rounds from first exceeding `(n^{k-2} p)^{-1}` infected to
    /// termination, for supercritical points.
    pub endgame_rounds: Vec<usize>,
    /// Trials that never exceeded the cutoff.
    pub endgame_missing: usize,
}

impl PointComparison {
    /// Fraction of trials that exceeded the cutoff and then finished within
    /// `rounds` rounds.
    pub fn endgame_fraction_within(&self, rounds: usize) -> f64 {
        let total = self.endgame_rounds.len() + self.endgame_missing;
        if total == 0 {
            return 0.0;
        }
        self.endgame_rounds.iter().filter(|&&r| r <= rounds).count() as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub validity_cutoff: f64,
    pub points: Vec<PointComparison>,
}

pub fn compare_to_analytics(result: &ExperimentResult, params: &ModelParams) -> Result<ComparisonReport> {
    let mut points = Vec::new();
    for summary in &result.points {
        let rows: Vec<_> = result
            .rows
            .iter()
            .filter(|r| r.point == summary.point && r.class != OutcomeClass::Failed)
            .collect();
        let finals: Vec<f64> = rows.iter().map(|r| r.final_infected as f64).collect();
        let (mean, se) = mean_and_se(&finals);
        let classification = fixed_point_classify(params, summary.a as f64)?;
        let relative_error = classification.a_star.map(|a_star| {
            if a_star == 0.0 {
                if mean == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                (mean - a_star).abs() / a_star
            }
        });
        let (endgame_rounds, endgame_missing) = if classification.label == RegimeLabel::Supercritical {
            let rounds: Vec<usize> = rows.iter().filter_map(|r| r.rounds_after_cutoff).collect();
            let missing = rows.len() - rounds.len();
            (rounds, missing)
        } else {
            (Vec::new(), 0)
        };
        points.push(PointComparison {
            point: summary.point,
            a_over_b: summary.a_over_b,
            a: summary.a,
            predicted: classification.label,
            a_star: classification.a_star,
            empirical_mean_final: mean,
            empirical_std_error: se,
            relative_error,
            endgame_rounds,
            endgame_missing,
        });
    }
    Ok(ComparisonReport { validity_cutoff: params.validity_cutoff(), points })
}
