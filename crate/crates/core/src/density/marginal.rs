use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-dimensional marginal of a product density, with closed-form CDF and inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Marginal {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Density (k+1)·t^k on [0, 1]; CDF t^(k+1).
    Power {
        k: f64,
    },
    Triangular {
        lo: f64,
        mode: f64,
        hi: f64,
    },
    /// Exponential with the given rate, truncated to [0, 1].
    TruncatedExponential {
        rate: f64,
    },
}

impl Marginal {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Marginal::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Marginal::Power { k } => k.is_finite() && k >= 0.0,
            Marginal::Triangular { lo, mode, hi } => {
                lo.is_finite() && hi.is_finite() && lo < hi && (lo..=hi).contains(&mode)
            }
            Marginal::TruncatedExponential { rate } => rate.is_finite() && rate != 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad marginal {self:?}")))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Marginal::Uniform { lo, hi } | Marginal::Triangular { lo, hi, .. } => (lo, hi),
            Marginal::Power { .. } | Marginal::TruncatedExponential { .. } => (0.0, 1.0),
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t < lo || t > hi {
            return 0.0;
        }
        match *self {
            Marginal::Uniform { lo, hi } => 1.0 / (hi - lo),
            Marginal::Power { k } => (k + 1.0) * t.powf(k),
            Marginal::Triangular { lo, mode, hi } => {
                if t < mode {
                    2.0 * (t - lo) / ((hi - lo) * (mode - lo))
                } else if t > mode {
                    2.0 * (hi - t) / ((hi - lo) * (hi - mode))
                } else {
                    2.0 / (hi - lo)
                }
            }
            Marginal::TruncatedExponential { rate } => rate * (-rate * t).exp() / (-(-rate).exp_m1()),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= lo {
            return 0.0;
        }
        if t >= hi {
            return 1.0;
        }
        match *self {
            Marginal::Uniform { lo, hi } => (t - lo) / (hi - lo),
            Marginal::Power { k } => t.powf(k + 1.0),
            Marginal::Triangular { lo, mode, hi } => {
                if t <= mode {
                    (t - lo).powi(2) / ((hi - lo) * (mode - lo))
                } else {
                    1.0 - (hi - t).powi(2) / ((hi - lo) * (hi - mode))
                }
            }
            Marginal::TruncatedExponential { rate } => (-rate * t).exp_m1() / (-rate).exp_m1(),
        }
    }

    pub fn inv_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match *self {
            Marginal::Uniform { lo, hi } => lo + u * (hi - lo),
            Marginal::Power { k } => u.powf(1.0 / (k + 1.0)),
            Marginal::Triangular { lo, mode, hi } => {
                let split = (mode - lo) / (hi - lo);
                if u <= split {
                    lo + (u * (hi - lo) * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - u) * (hi - lo) * (hi - mode)).sqrt()
                }
            }
            Marginal::TruncatedExponential { rate } => -(u * (-rate).exp_m1()).ln_1p() / rate,
        }
    }

    /// Largest value of the marginal density.
    pub fn pdf_max(&self) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => 1.0 / (hi - lo),
            Marginal::Power { k } => k + 1.0,
            Marginal::Triangular { lo, hi, .. } => 2.0 / (hi - lo),
            Marginal::TruncatedExponential { rate } => self.pdf(if rate > 0.0 { 0.0 } else { 1.0 }),
        }
    }

    pub fn pdf_min(&self) -> f64 {
        match *self {
            Marginal::Uniform { lo, hi } => 1.0 / (hi - lo),
            Marginal::Power { k } => {
                if k == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Marginal::Triangular { .. } => 0.0,
            Marginal::TruncatedExponential { rate } => self.pdf(if rate > 0.0 { 1.0 } else { 0.0 }),
        }
    }
}
