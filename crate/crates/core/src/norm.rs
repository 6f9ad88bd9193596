//! The ℓ_p metrics used for balls and edge rules.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    #[serde(alias = "linf", alias = "max")]
    LInf,
}

impl Norm {
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::LInf => diffs.fold(0.0, f64::max),
        }
    }

    #[inline]
    pub fn length(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// Volume of the unit ball in `dim` dimensions.
    pub fn unit_ball_volume(self, dim: usize) -> f64 {
        match self {
            Norm::LInf => 2f64.powi(dim as i32),
            Norm::L1 => (1..=dim).fold(1.0, |v, k| v * 2.0 / k as f64),
            Norm::L2 => {
                // θ_d = θ_{d-2} · 2π / d, θ_0 = 1, θ_1 = 2.
                let mut theta = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
                let mut k = if dim.is_multiple_of(2) { 2 } else { 3 };
                while k <= dim {
                    theta *= 2.0 * PI / k as f64;
                    k += 2;
                }
                theta
            }
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::LInf => "linf",
        })
    }
}

/// A norm bound to a dimension, carrying its unit-ball volume θ_d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub norm: Norm,
    pub dim: usize,
    pub theta: f64,
}

impl NormSpec {
    pub fn new(norm: Norm, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self {
            norm,
            dim,
            theta: norm.unit_ball_volume(dim),
        })
    }

    #[inline]
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.norm.distance(a, b)
    }

    #[inline]
    pub fn length(&self, v: &[f64]) -> f64 {
        self.norm.length(v)
    }

    /// Volume of a ball of radius `r`.
    #[inline]
    pub fn ball_volume(&self, r: f64) -> f64 {
        self.theta * r.powi(self.dim as i32)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}
