use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Regime window constants: `n^{k-1} p >= 10` and `n^{k-2+1/r} p <= 0.1`.
pub const REGIME_LOWER: f64 = 10.0;
pub const REGIME_UPPER: f64 = 0.1;

/// The tuple `(n, k, r, p)` describing bootstrap percolation with threshold
/// `r` on the binomial k-uniform hypergraph with `n` vertices and edge
/// probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    pub k: u32,
    pub r: u32,
    pub p: f64,
}

/// Where the parameters sit relative to the window `n^{-1} << n^{k-2} p << n^{-1/r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    /// `n^{k-1} p`, which must be large.
    pub lower_margin: f64,
    /// `n^{k-2+1/r} p`, which must be small.
    pub upper_margin: f64,
    pub regime_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRegime {
    REqualsTwo,
    RGreaterTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub regime_label: ThresholdRegime,
}

impl ModelParams {
    pub fn new(n: u32, k: u32, r: u32, p: f64) -> Result<Self> {
        let params = Self { n, k, r, p };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with `p = n^{-exponent}`.
    pub fn with_p_exponent(n: u32, k: u32, r: u32, exponent: f64) -> Result<Self> {
        Self::new(n, k, r, (n as f64).powf(-exponent))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("k must be at least 2, got {}", self.k)));
        }
        if self.r < 2 {
            return Err(Error::InvalidParams(format!("r must be at least 2, got {}", self.r)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParams(format!("p must lie in [0, 1], got {}", self.p)));
        }
        Ok(())
    }

    /// `C(n, k-2) p`: the probability that two fixed vertices are neighbours,
    /// to first order.
    pub fn pair_rate(&self) -> f64 {
        binomial_f64(self.n as f64, self.k - 2) * self.p
    }

    /// `n^{k-2} p`.
    pub fn scaled_density(&self) -> f64 {
        (self.n as f64).powi(self.k as i32 - 2) * self.p
    }

    /// `(n^{k-2} p)^{-1}`: the infected-set size beyond which the
    /// class-size recurrences stop being valid.
    pub fn validity_cutoff(&self) -> f64 {
        1.0 / self.scaled_density()
    }

    /// Coefficient `c` of the fixed-point map `x -> a + c x^r`, that is
    /// `n (C(n, k-2) p)^r / r!`.
    pub fn recurrence_coefficient(&self) -> f64 {
        self.n as f64 * self.pair_rate().powi(self.r as i32) / factorial_f64(self.r)
    }

    /// `x* = ((r-1)! / (n (C(n,k-2) p)^r))^{1/(r-1)}`, the point where the
    /// fixed-point map has unit slope.
    pub fn unit_slope_point(&self) -> f64 {
        let c = self.n as f64 * self.pair_rate().powi(self.r as i32);
        (factorial_f64(self.r - 1) / c).powf(1.0 / (self.r as f64 - 1.0))
    }

    pub fn regime(&self) -> RegimeCheck {
        let n = self.n as f64;
        let lower_margin = n.powi(self.k as i32 - 1) * self.p;
        let upper_margin = n.powf(self.k as f64 - 2.0 + 1.0 / self.r as f64) * self.p;
        RegimeCheck {
            lower_margin,
            upper_margin,
            regime_ok: lower_margin >= REGIME_LOWER && upper_margin <= REGIME_UPPER,
        }
    }
}

/// The critical initial-set size `b_{k,r}`.
///
/// For `r > 2` this is `(1 - 1/r) ((r-1)! / (n (C(n,k-2) p)^r))^{1/(r-1)}`;
/// for `r = 2` it is `1 / (2 (2k-3) n (C(n,k-2) p)^2)`.
pub fn threshold_b(params: &ModelParams) -> Result<Threshold> {
    params.validate()?;
    if params.p == 0.0 {
        return Err(Error::ZeroProbability);
    }
    let n = params.n as f64;
    let rate = params.pair_rate();
    if params.r == 2 {
        let multiplier = 1.0 / (2.0 * (2.0 * params.k as f64 - 3.0));
        Ok(Threshold {
            value: multiplier / (n * rate * rate),
            regime_label: ThresholdRegime::REqualsTwo,
        })
    } else {
        let r = params.r as f64;
        Ok(Threshold {
            value: (1.0 - 1.0 / r) * params.unit_slope_point(),
            regime_label: ThresholdRegime::RGreaterTwo,
        })
    }
}

/// `C(n, j)` in floating point via the running product; exact for small `j`.
pub(crate) fn binomial_f64(n: f64, j: u32) -> f64 {
    if (j as f64) > n {
        return 0.0;
    }
    (0..j).fold(1.0, |acc, i| acc * (n - i as f64) / (i as f64 + 1.0))
}

pub(crate) fn factorial_f64(m: u32) -> f64 {
    (2..=m).fold(1.0, |acc, i| acc * i as f64)
}
