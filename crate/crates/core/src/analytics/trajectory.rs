use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::hypermodel::{factorial_f64, ModelParams};
use crate::{Error, Result};

/// Default tolerance `eta` in `Delta(tau) <= eta b`.
pub const DEFAULT_ETA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recurrence {
    /// Per-round increments driven by the newly infected mass.
    Incremental,
    /// `a_i(t+1) = a_r(t)^i / i! * n * (C(n,k-2) p)^i + a_i(0)`.
    ClosedForm,
}

/// Expected class sizes `a_0(t), ..., a_r(t)` over rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub recurrence: Recurrence,
    /// `classes[t][i] = a_i(t)`.
    pub classes: Vec<Vec<f64>>,
    /// `deltas[t] = a_r(t+1) - a_r(t)`.
    pub deltas: Vec<f64>,
    /// `(n^{k-2} p)^{-1}`.
    pub validity_cutoff: f64,
    /// First round with `a_r(t) >= validity_cutoff`, if reached.
    pub cutoff_round: Option<usize>,
}

impl Trajectory {
    pub fn r(&self) -> usize {
        self.classes[0].len() - 1
    }

    pub fn infected(&self, t: usize) -> f64 {
        self.classes[t][self.r()]
    }

    pub fn final_infected(&self) -> f64 {
        self.infected(self.classes.len() - 1)
    }

    /// CSV with columns `t, a_0..a_r, delta`; the last row has an empty delta.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        write!(w, "t")?;
        for i in 0..=self.r() {
            write!(w, ",a_{i}")?;
        }
        writeln!(w, ",delta")?;
        for (t, row) in self.classes.iter().enumerate() {
            write!(w, "{t}")?;
            for a in row {
                write!(w, ",{a}")?;
            }
            match self.deltas.get(t) {
                Some(d) => writeln!(w, ",{d}")?,
                None => writeln!(w, ",")?,
            }
        }
        Ok(())
    }
}

fn check_start(a: f64) -> Result<()> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidArgument(format!("initial size must be finite and >= 0, got {a}")));
    }
    Ok(())
}

fn initial_state(params: &ModelParams, a: f64) -> Vec<f64> {
    let mut state = vec![0.0; params.r as usize + 1];
    state[0] = params.n as f64;
    state[params.r as usize] = a;
    state
}

fn iterate<F>(params: &ModelParams, a: f64, t_max: usize, recurrence: Recurrence, mut step: F) -> Trajectory
where
    F: FnMut(&[Vec<f64>]) -> Vec<f64>,
{
    let r = params.r as usize;
    let cutoff = params.validity_cutoff();
    let mut classes = vec![initial_state(params, a)];
    let mut cutoff_round = (a >= cutoff).then_some(0);
    while cutoff_round.is_none() && classes.len() <= t_max {
        let next = step(&classes);
        let reached = next[r] >= cutoff;
        classes.push(next);
        if reached {
            cutoff_round = Some(classes.len() - 1);
        }
    }
    let deltas = classes.windows(2).map(|w| w[1][r] - w[0][r]).collect();
    Trajectory { recurrence, classes, deltas, validity_cutoff: cutoff, cutoff_round }
}

/// Iterates the closed-form recurrence for at most `t_max` rounds, stopping
/// early once `a_r(t)` reaches the validity cutoff.
pub fn trajectory_eq2(params: &ModelParams, a: f64, t_max: usize) -> Result<Trajectory> {
    params.validate()?;
    check_start(a)?;
    let r = params.r as usize;
    let n = params.n as f64;
    let rate = params.pair_rate();
    let initial = initial_state(params, a);
    Ok(iterate(params, a, t_max, Recurrence::ClosedForm, |hist| {
        let ar = hist[hist.len() - 1][r];
        let mut next = initial.clone();
        for i in 1..=r {
            next[i] = ar.powi(i as i32) / factorial_f64(i as u32) * n * rate.powi(i as i32) + initial[i];
        }
        next
    }))
}

/// Iterates the incremental recurrence
/// `a_i(t+1) - a_i(t) = sum_{j=1..i} (d^j / j!) a_{i-j}(t) (C(n,k-2) p)^j`
/// with `d = a_r(t) - a_r(t-1)` and `a_r(-1) = 0`, keeping `a_0 = n`.
pub fn trajectory_eq1(params: &ModelParams, a: f64, t_max: usize) -> Result<Trajectory> {
    params.validate()?;
    check_start(a)?;
    let r = params.r as usize;
    let rate = params.pair_rate();
    Ok(iterate(params, a, t_max, Recurrence::Incremental, |hist| {
        let cur = &hist[hist.len() - 1];
        let prev_ar = if hist.len() >= 2 { hist[hist.len() - 2][r] } else { 0.0 };
        let d = cur[r] - prev_ar;
        let mut next = cur.clone();
        for i in 1..=r {
            next[i] += (1..=i)
                .map(|j| d.powi(j as i32) / factorial_f64(j as u32) * cur[i - j] * rate.powi(j as i32))
                .sum::<f64>();
        }
        next
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaDiagnostics {
    /// First round with `Delta(t) <= eta b`, for trajectories that never
    /// reach the validity cutoff.
    pub tau: Option<usize>,
    /// First round from which `Delta` more than doubles at every step up to
    /// the cutoff round, for trajectories that reach it.
    pub t2: Option<usize>,
}

pub fn delta_diagnostics(traj: &Trajectory, b: f64, eta: f64) -> DeltaDiagnostics {
    let deltas = &traj.deltas;
    match traj.cutoff_round {
        None => DeltaDiagnostics {
            tau: deltas.iter().position(|&d| d <= eta * b),
            t2: None,
        },
        Some(_) => DeltaDiagnostics { tau: None, t2: doubling_onset(deltas) },
    }
}

/// Smallest `t` with `deltas[s+1] > 2 deltas[s]` for every `s >= t`.
pub(crate) fn doubling_onset(deltas: &[f64]) -> Option<usize> {
    if deltas.len() < 2 {
        return None;
    }
    let mut t2 = deltas.len() - 1;
    while t2 > 0 && deltas[t2] > 2.0 * deltas[t2 - 1] {
        t2 -= 1;
    }
    (t2 < deltas.len() - 1).then_some(t2)
}
