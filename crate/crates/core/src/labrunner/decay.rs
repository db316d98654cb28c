use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::sweep::{run_sweep, ExperimentConfig, OutcomeClass};
use crate::hypermodel::ModelParams;
use crate::{Error, Result};

/// Misclassification rate for one `(n, a/b)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: u32,
    pub p: f64,
    pub b: f64,
    pub a_over_b: f64,
    pub a: u64,
    pub trials: usize,
    pub failures: usize,
    pub failure_fraction: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub config: ExperimentConfig,
    pub p_exponent: f64,
    pub rows: Vec<DecayRow>,
}

/// Runs the base sweep once per `n` in `n_grid` with `p = n^{-p_exponent}`
/// and counts trials that land on the wrong side: not small below the
/// threshold, not near full above it. Trial seeds are the base sweep's, so a
/// single-point grid reproduces `run_sweep` exactly.
pub fn failure_decay_scan(base: &ExperimentConfig, n_grid: &[u32], p_exponent: f64) -> Result<DecayTable> {
    if base.params.k != 2 {
        return Err(Error::InvalidArgument(format!("decay scan needs k = 2, got k = {}", base.params.k)));
    }
    if n_grid.is_empty() {
        return Err(Error::InvalidArgument("n grid is empty".into()));
    }
    let eps = base.epsilon;
    if let Some(x) = base.a_over_b.iter().find(|&&x| x > 1.0 - eps && x < 1.0 + eps) {
        return Err(Error::InvalidArgument(format!("a/b = {x} lies inside the critical window 1 +- {eps}")));
    }
    let mut rows = Vec::new();
    for &n in n_grid {
        let params = ModelParams::with_p_exponent(n, base.params.k, base.params.r, p_exponent)?;
        let config = ExperimentConfig { params, p_exponent: Some(p_exponent), ..base.clone() };
        let result = run_sweep(&config)?;
        for point in &result.points {
            let expected = if point.a_over_b < 1.0 { OutcomeClass::Small } else { OutcomeClass::NearFull };
            let failures =
                result.rows.iter().filter(|r| r.point == point.point && r.class != expected).count();
            let frac = failures as f64 / point.trials as f64;
            rows.push(DecayRow {
                n,
                p: params.p,
                b: result.b,
                a_over_b: point.a_over_b,
                a: point.a,
                trials: point.trials,
                failures,
                failure_fraction: frac,
                std_error: (frac * (1.0 - frac) / point.trials as f64).sqrt(),
            });
        }
    }
    Ok(DecayTable { config: base.clone(), p_exponent, rows })
}

impl DecayTable {
    pub fn rows_for(&self, a_over_b: f64) -> Vec<&DecayRow> {
        self.rows.iter().filter(|r| r.a_over_b == a_over_b).collect()
    }

    /// Whether the failure fraction at `a_over_b` never rises between
    /// consecutive `n` by more than `z` combined standard errors.
    pub fn nonincreasing_within(&self, a_over_b: f64, z: f64) -> bool {
        self.rows_for(a_over_b).windows(2).all(|w| {
            let slack = z * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
            w[1].failure_fraction <= w[0].failure_fraction + slack
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# decay: p_exponent={} {}",
            self.p_exponent,
            self.config.to_comment()
        )?;
        writeln!(w, "n,p,b,a_over_b,a,trials,failures,failure_fraction,std_error")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.n, r.p, r.b, r.a_over_b, r.a, r.trials, r.failures, r.failure_fraction, r.std_error
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        let params = ModelParams::with_p_exponent(4000, 2, 2, 0.7).unwrap();
        ExperimentConfig::new(params, vec![0.5, 2.0], 6, 5)
    }

    #[test]
    fn single_point_matches_sweep() {
        let table = failure_decay_scan(&base(), &[4000], 0.7).unwrap();
        assert_eq!(table.rows.len(), 2);
        let sweep = run_sweep(&base()).unwrap();
        for (row, point) in table.rows.iter().zip(&sweep.points) {
            assert_eq!(row.a, point.a);
            assert_eq!(row.b, sweep.b);
            let expected_fail = if point.a_over_b < 1.0 { 1.0 - point.frac_small } else { 1.0 - point.frac_near_full };
            assert!((row.failure_fraction - expected_fail).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_hypergraphs_and_critical_ratios() {
        let mut cfg = base();
        cfg.params.k = 3;
        assert!(failure_decay_scan(&cfg, &[1000], 0.7).is_err());
        let mut cfg = base();
        cfg.a_over_b = vec![0.9];
        assert!(failure_decay_scan(&cfg, &[1000], 0.7).is_err());
        assert!(failure_decay_scan(&base(), &[], 0.7).is_err());
    }

    #[test]
    fn trend_check() {
        let mk = |fracs: &[f64]| DecayTable {
            config: base(),
            p_exponent: 0.7,
            rows: fracs
                .iter()
                .enumerate()
                .map(|(i, &f)| DecayRow {
                    n: 1000 * (i as u32 + 1),
                    p: 0.0,
                    b: 0.0,
                    a_over_b: 2.0,
                    a: 0,
                    trials: 100,
                    failures: (f * 100.0) as usize,
                    failure_fraction: f,
                    std_error: (f * (1.0 - f) / 100.0).sqrt(),
                })
                .collect(),
        };
        assert!(mk(&[0.2, 0.1, 0.0]).nonincreasing_within(2.0, 2.0));
        assert!(mk(&[0.1, 0.15, 0.05]).nonincreasing_within(2.0, 2.0));
        assert!(!mk(&[0.0, 0.3]).nonincreasing_within(2.0, 2.0));
    }
}
