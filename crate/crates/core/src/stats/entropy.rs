//! H(a) = 1 − a + a log a and its two inverse branches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target residual |H(a) − y| for the inverse branches.
pub const H_INVERSE_RESIDUAL: f64 = 1e-10;

pub fn entropy_h(a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::InvalidParameter(format!("H needs a >= 0, got {a}")));
    }
    Ok(h(a))
}

#[inline]
fn h(a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        1.0 - a + a * a.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// H restricted to [1, ∞).
    Plus,
    /// H restricted to [0, 1].
    Minus,
}

/// The a on the chosen branch with H(a) = y, by bisection.
pub fn h_inverse(y: f64, branch: Branch) -> Result<f64> {
    let valid = match branch {
        Branch::Plus => y >= 0.0 && y.is_finite(),
        Branch::Minus => (0.0..=1.0).contains(&y),
    };
    if !valid {
        return Err(Error::InvalidParameter(format!(
            "y = {y} outside the range of the {branch:?} branch"
        )));
    }
    if y == 0.0 {
        return Ok(1.0);
    }
    // g(a) = H(a) − y changes sign on [lo, hi]; `rising` says which end is positive.
    let (mut lo, mut hi, rising) = match branch {
        Branch::Plus => {
            let mut hi = 2.0;
            while h(hi) < y {
                hi *= 2.0;
            }
            (1.0, hi, true)
        }
        Branch::Minus => {
            if y == 1.0 {
                return Ok(0.0);
            }
            (0.0, 1.0, false)
        }
    };
    let mut best = (f64::INFINITY, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let g = h(mid) - y;
        if g.abs() < best.0 {
            best = (g.abs(), mid);
        }
        if g.abs() <= 0.25 * H_INVERSE_RESIDUAL {
            break;
        }
        if (g > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeBounds {
    /// c H₊⁻¹(1/c) log n.
    pub upper: f64,
    /// c H₋⁻¹(1/c) log n for c > 1; absent for c ≤ 1.
    pub lower: Option<f64>,
}

pub fn degree_bounds(c: f64, n: f64) -> Result<DegreeBounds> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    let log_n = n.ln();
    let upper = c * h_inverse(1.0 / c, Branch::Plus)? * log_n;
    let lower = if c > 1.0 {
        Some(c * h_inverse(1.0 / c, Branch::Minus)? * log_n)
    } else {
        None
    };
    Ok(DegreeBounds { upper, lower })
}
