use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::hypermodel::{factorial_f64, ModelParams};
use crate::rng::{stream_rng, BRANCHING_STREAM};
use crate::{Error, Result};

/// A trial whose total progeny passes this many nodes is abandoned and
/// reported as overflowed.
pub const GENERATION_CAP: u64 = 10_000_000;

/// One summand `Bin(trials, success_prob)` of the offspring distribution.
///
/// `trials` may be fractional; the fractional part contributes one extra
/// Bernoulli trial with probability `frac(trials) * success_prob`, so the
/// mean is exactly `trials * success_prob`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffspringClass {
    pub trials: f64,
    pub success_prob: f64,
}

impl OffspringClass {
    pub fn mean(&self) -> f64 {
        self.trials * self.success_prob
    }
}

/// Galton-Watson process dominating the late subcritical infection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwSpec {
    pub roots: u64,
    /// `(1 + delta) a_i(tau)` for `i = 0..=r`; empty for hand-built specs.
    pub class_sizes_at_tau: Vec<f64>,
    pub delta: f64,
    /// `q_j` for `j = 1..r-1`, empty for hand-built specs.
    pub success_probs: Vec<f64>,
    pub offspring: Vec<OffspringClass>,
    pub mean_offspring: f64,
    pub subcritical: bool,
}

impl GwSpec {
    /// A process with an explicit offspring law.
    pub fn from_offspring(roots: u64, offspring: Vec<OffspringClass>) -> Result<Self> {
        for c in &offspring {
            if !(c.trials.is_finite() && c.trials >= 0.0) || !(0.0..=1.0).contains(&c.success_prob) {
                return Err(Error::InvalidArgument(format!("bad offspring class {c:?}")));
            }
        }
        let mean_offspring = offspring.iter().map(OffspringClass::mean).sum::<f64>();
        Ok(Self {
            roots,
            class_sizes_at_tau: Vec::new(),
            delta: 0.0,
            success_probs: Vec::new(),
            offspring,
            mean_offspring,
            subcritical: mean_offspring < 1.0,
        })
    }

    /// `roots / (1 - mu)`, the expected total progeny including the roots.
    pub fn expected_total(&self) -> f64 {
        self.roots as f64 / (1.0 - self.mean_offspring)
    }
}

/// Builds the coupling process from class sizes `a_0(tau), ..., a_r(tau)`.
///
/// The offspring law is `sum_{j=1}^{r-1} Bin((1 + delta) a_{r-j}(tau), q_j)`
/// with `q_j = C(n,k-2) p (delta a_r(tau))^{j-1} / (j-1)! (C(n,k-2) p)^{r-j-1}`.
pub fn gw_spec_from_state(params: &ModelParams, class_sizes: &[f64], delta: f64, roots: u64) -> Result<GwSpec> {
    params.validate()?;
    let r = params.r as usize;
    if class_sizes.len() != r + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} class sizes, got {}",
            r + 1,
            class_sizes.len()
        )));
    }
    if class_sizes.iter().any(|&a| !(a.is_finite() && a >= 0.0)) {
        return Err(Error::InvalidArgument("class sizes must be finite and >= 0".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let rate = params.pair_rate();
    let infected = class_sizes[r];
    let success_probs: Vec<f64> = (1..r)
        .map(|j| {
            let q = rate * (delta * infected).powi(j as i32 - 1) / factorial_f64(j as u32 - 1)
                * rate.powi((r - j - 1) as i32);
            q.min(1.0)
        })
        .collect();
    let offspring: Vec<OffspringClass> = (1..r)
        .map(|j| OffspringClass { trials: (1.0 + delta) * class_sizes[r - j], success_prob: success_probs[j - 1] })
        .collect();
    let mut spec = GwSpec::from_offspring(roots, offspring)?;
    spec.class_sizes_at_tau = class_sizes.iter().map(|a| (1.0 + delta) * a).collect();
    spec.delta = delta;
    spec.success_probs = success_probs;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwEstimate {
    pub trials: usize,
    /// Trials abandoned at [`GENERATION_CAP`].
    pub overflowed: usize,
    /// Mean total progeny (roots included) over completed trials.
    pub mean: f64,
    pub std_error: f64,
    /// `roots / (1 - mu)`.
    pub wald_mean: f64,
    /// `(threshold, P(total > threshold))`; overflowed trials count as exceeding.
    pub exceed_prob: Vec<(f64, f64)>,
}

/// Monte Carlo estimate of the total progeny distribution.
pub fn gw_total_size(spec: &GwSpec, trials: usize, seed: u64, thresholds: &[f64]) -> Result<GwEstimate> {
    if !(spec.mean_offspring < 1.0) {
        return Err(Error::NotSubcritical { mu: spec.mean_offspring });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut rng = stream_rng(seed, BRANCHING_STREAM);
    let mut totals = Vec::with_capacity(trials);
    let mut overflowed = 0;
    for _ in 0..trials {
        match total_progeny(spec, &mut rng) {
            Some(t) => totals.push(t),
            None => overflowed += 1,
        }
    }
    let done = totals.len() as f64;
    let mean = totals.iter().map(|&t| t as f64).sum::<f64>() / done;
    let var = if totals.len() > 1 {
        totals.iter().map(|&t| (t as f64 - mean).powi(2)).sum::<f64>() / (done - 1.0)
    } else {
        0.0
    };
    let exceed_prob = thresholds
        .iter()
        .map(|&h| {
            let hits = totals.iter().filter(|&&t| t as f64 > h).count() + overflowed;
            (h, hits as f64 / trials as f64)
        })
        .collect();
    Ok(GwEstimate {
        trials,
        overflowed,
        mean,
        std_error: (var / done).sqrt(),
        wald_mean: spec.expected_total(),
        exceed_prob,
    })
}

/// Total progeny of one realisation, or `None` past the cap. The offspring
/// of a whole generation of size `g` is drawn at once: a sum of `g`
/// independent `Bin(m, q)` variables is `Bin(g m, q)`.
fn total_progeny<R: Rng>(spec: &GwSpec, rng: &mut R) -> Option<u64> {
    let mut generation = spec.roots;
    let mut total = spec.roots;
    while generation > 0 {
        let mut next = 0u64;
        for class in &spec.offspring {
            let whole = class.trials.floor();
            let frac = class.trials - whole;
            next += binomial(rng, generation * whole as u64, class.success_prob);
            if frac > 0.0 {
                next += binomial(rng, generation, frac * class.success_prob);
            }
        }
        total += next;
        if total > GENERATION_CAP {
            return None;
        }
        generation = next;
    }
    Some(total)
}

fn binomial<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    Binomial::new(n, p).expect("probability in [0, 1]").sample(rng)
}
