use serde::{Deserialize, Serialize};

use super::trajectory::doubling_onset;
use crate::hypermodel::{threshold_b, ModelParams};
use crate::{Error, Result};

/// Hard cap on fixed-point iterations; only reachable for `a` within about
/// `1e-12` relative of the boundary.
const MAX_ITERATIONS: usize = 100_000_000;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    Subcritical,
    Supercritical,
}

/// Outcome of iterating `x -> a + n (C(n,k-2) p)^r x^r / r!` from `x = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub label: RegimeLabel,
    pub a_star: Option<f64>,
    pub divergence_round: Option<usize>,
    pub t2: Option<usize>,
}

pub fn fixed_point_classify(params: &ModelParams, a: f64) -> Result<RegimeClassification> {
    params.validate()?;
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidArgument(format!("initial size must be finite and >= 0, got {a}")));
    }
    let scale = if params.p > 0.0 { threshold_b(params)?.value.max(1.0) } else { 1.0 };
    let tol = 1e-9 * scale;
    let c = params.recurrence_coefficient();
    let r = params.r as i32;
    let x_star = params.unit_slope_point();
    let cutoff = (3.0 * x_star).max(params.validity_cutoff());

    // Doubling needs slope > 2, which only happens above x*, so increments
    // are kept from the first step that crosses it.
    let mut x = a;
    let mut tail: Vec<f64> = Vec::new();
    let mut tail_start = 0;
    for t in 0..MAX_ITERATIONS {
        let next = a + c * x.powi(r);
        let delta = next - x;
        if next > x_star {
            if tail.is_empty() {
                tail_start = t;
            }
            tail.push(delta);
        }
        if next > cutoff {
            return Ok(supercritical(t + 1, tail_start, &tail));
        }
        if delta.abs() < tol {
            return Ok(subcritical(next));
        }
        x = next;
    }
    Ok(if x > x_star { supercritical(MAX_ITERATIONS, tail_start, &tail) } else { subcritical(x) })
}

fn subcritical(a_star: f64) -> RegimeClassification {
    RegimeClassification { label: RegimeLabel::Subcritical, a_star: Some(a_star), divergence_round: None, t2: None }
}

fn supercritical(round: usize, tail_start: usize, tail: &[f64]) -> RegimeClassification {
    RegimeClassification {
        label: RegimeLabel::Supercritical,
        a_star: None,
        divergence_round: Some(round),
        t2: doubling_onset(tail).map(|t| t + tail_start),
    }
}

/// Number of vertices infected by one elementary event: `2k - 3` for
/// `r = 2` (two edges meeting in one vertex), otherwise 1.
pub fn infection_multiplicity(k: u32, r: u32) -> u32 {
    if r == 2 {
        2 * k - 3
    } else {
        1
    }
}

/// Critical initial size recovered from the recurrence alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalEstimate {
    /// Supremum of `a` for which the fixed-point iteration converges.
    pub raw: f64,
    pub multiplicity: u32,
    /// `raw / multiplicity`, comparable with `b_{k,r}`.
    pub corrected: f64,
    /// `b_{k,r}` from the closed formula.
    pub threshold: f64,
}

/// Bisection for the largest subcritical `a`, starting from `[0, 10 b]`.
pub fn empirical_critical_a(params: &ModelParams) -> Result<CriticalEstimate> {
    let b = threshold_b(params)?.value;
    let is_sub = |a: f64| -> Result<bool> {
        Ok(fixed_point_classify(params, a)?.label == RegimeLabel::Subcritical)
    };
    let mut lo = 0.0;
    let mut hi = 10.0 * b;
    // For r = 2 and k >= 7 the raw boundary (2k - 3) b lies beyond 10 b.
    while is_sub(hi)? {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if is_sub(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let raw = 0.5 * (lo + hi);
    let multiplicity = infection_multiplicity(params.k, params.r);
    Ok(CriticalEstimate { raw, multiplicity, corrected: raw / multiplicity as f64, threshold: b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_params() -> ModelParams {
        ModelParams::new(1_000_000, 2, 2, 1e-4).unwrap()
    }

    #[test]
    fn zero_start() {
        let c = fixed_point_classify(&graph_params(), 0.0).unwrap();
        assert_eq!(c.label, RegimeLabel::Subcritical);
        assert_eq!(c.a_star, Some(0.0));
        assert_eq!(c.divergence_round, None);
    }

    #[test]
    fn subcritical_matches_quadratic_root() {
        // x = 25 + 0.005 x^2  =>  x = (1 - sqrt(1 - 0.5)) / 0.01.
        let c = fixed_point_classify(&graph_params(), 25.0).unwrap();
        let exact = (1.0 - 0.5f64.sqrt()) / 0.01;
        assert_eq!(c.label, RegimeLabel::Subcritical);
        assert!((c.a_star.unwrap() - exact).abs() < 1e-5);
        assert!((exact - 29.289).abs() < 1e-3);
    }

    #[test]
    fn supercritical_without_real_root() {
        let c = fixed_point_classify(&graph_params(), 75.0).unwrap();
        assert_eq!(c.label, RegimeLabel::Supercritical);
        assert!(c.a_star.is_none());
        assert!(c.divergence_round.is_some());
        assert!(c.t2.is_some());
    }

    #[test]
    fn json_shape() {
        let c = fixed_point_classify(&graph_params(), 75.0).unwrap();
        let v = serde_json::to_value(c).unwrap();
        assert_eq!(v["label"], "supercritical");
        assert!(v["a_star"].is_null());
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 4);
    }

    #[test]
    fn multiplicity() {
        assert_eq!(infection_multiplicity(2, 2), 1);
        assert_eq!(infection_multiplicity(5, 2), 7);
        assert_eq!(infection_multiplicity(5, 3), 1);
    }

    #[test]
    fn critical_graph_values() {
        let e = empirical_critical_a(&graph_params()).unwrap();
        assert!((e.raw - 50.0).abs() <= 0.5);
        let e = empirical_critical_a(&ModelParams::new(1_000_000, 2, 3, 1e-3).unwrap()).unwrap();
        assert!((e.raw - 29.81).abs() <= 0.3);
        assert_eq!(e.corrected, e.raw);
    }

    #[test]
    fn critical_beyond_initial_bracket() {
        // k = 8: raw boundary is 13 b.
        let params = ModelParams::new(200, 8, 2, 1e-14).unwrap();
        let e = empirical_critical_a(&params).unwrap();
        assert!((e.corrected / e.threshold - 1.0).abs() < 0.01);
        assert_eq!(e.multiplicity, 13);
    }

    #[test]
    fn subcritical_fixed_point_below_unit_slope_point() {
        for &(k, r, n, p) in &[(2u32, 2u32, 1_000_000u32, 1e-4), (2, 3, 1_000_000, 1e-3), (3, 2, 100_000, 3e-9), (2, 4, 100_000, 2e-4)] {
            let params = ModelParams::new(n, k, r, p).unwrap();
            let b = threshold_b(&params).unwrap().value * infection_multiplicity(k, r) as f64;
            let bound = params.unit_slope_point();
            for frac in [0.1, 0.5, 0.8, 0.95] {
                let c = fixed_point_classify(&params, frac * b).unwrap();
                assert_eq!(c.label, RegimeLabel::Subcritical);
                let a_star = c.a_star.unwrap();
                assert!(a_star >= frac * b && a_star <= bound * (1.0 + 1e-9));
                // x* = r / (r - 1) times the raw boundary.
                assert!((bound - r as f64 / (r as f64 - 1.0) * b).abs() < 1e-6 * bound);
            }
        }
    }
}
