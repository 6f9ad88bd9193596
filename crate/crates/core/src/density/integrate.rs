//! Deterministic quasi-Monte Carlo integration over norm balls.
//!
//! A fixed Halton point set inside the unit ball is replicated under a few
//! fixed Cranley–Patterson shifts; the spread of the per-shift estimates is
//! the reported error. The estimate θ_d r^d · mean f(x + r·v) is continuous
//! in r whenever f is continuous.

use serde::{Deserialize, Serialize};

use crate::norm::NormSpec;
use crate::numeric::{cp_shift, halton};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegrationSettings {
    /// Total number of candidate points across all shifts.
    pub budget: usize,
    pub shifts: usize,
    /// Largest accepted error estimate relative to the estimate itself.
    pub rel_tol: f64,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            budget: 4096,
            shifts: 8,
            rel_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub value: f64,
    pub error: f64,
}

impl MassEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Shifted Halton points inside the unit ball of one norm.
#[derive(Debug, Clone)]
pub struct QmcBall {
    dim: usize,
    theta: f64,
    /// One flat coordinate buffer per shift.
    sets: Vec<Vec<f64>>,
}

impl QmcBall {
    pub fn new(norm: &NormSpec, settings: &IntegrationSettings) -> Self {
        let dim = norm.dim;
        let shifts = settings.shifts.max(2);
        let per_shift = (settings.budget / shifts).max(16) as u64;
        let mut u = vec![0.0; dim];
        let mut v = vec![0.0; dim];
        let sets = (0..shifts)
            .map(|k| {
                let shift = cp_shift(k, dim);
                let mut set = Vec::with_capacity(per_shift as usize * dim);
                for i in 0..per_shift {
                    halton(i, dim, &mut u);
                    for j in 0..dim {
                        v[j] = 2.0 * (u[j] + shift[j]).fract() - 1.0;
                    }
                    if norm.length(&v) <= 1.0 {
                        set.extend_from_slice(&v);
                    }
                }
                set
            })
            .collect();
        Self {
            dim,
            theta: norm.theta,
            sets,
        }
    }

    /// ∫_{B(center, r)} g.
    pub fn integrate(&self, center: &[f64], r: f64, mut g: impl FnMut(&[f64]) -> f64) -> MassEstimate {
        let volume = self.theta * r.powi(self.dim as i32);
        let mut y = vec![0.0; self.dim];
        let estimates: Vec<f64> = self
            .sets
            .iter()
            .map(|set| {
                let count = set.len() / self.dim;
                if count == 0 {
                    return 0.0;
                }
                let sum: f64 = set
                    .chunks_exact(self.dim)
                    .map(|v| {
                        for j in 0..self.dim {
                            y[j] = center[j] + r * v[j];
                        }
                        g(&y)
                    })
                    .sum();
                volume * sum / count as f64
            })
            .collect();
        let k = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / k;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0);
        MassEstimate {
            value: mean,
            error: (var / k).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::Norm;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_constant_exactly() {
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let spec = NormSpec::new(norm, 2).unwrap();
            let q = QmcBall::new(&spec, &IntegrationSettings::default());
            let m = q.integrate(&[0.3, 0.4], 0.2, |_| 2.0);
            assert_relative_eq!(m.value, 2.0 * spec.ball_volume(0.2), max_relative = 1e-12);
            assert!(m.error < 1e-12);
        }
    }

    #[test]
    fn integrates_linear_function() {
        let spec = NormSpec::new(Norm::L2, 2).unwrap();
        let q = QmcBall::new(&spec, &IntegrationSettings::default());
        // ∫_{B(0,1)} (1 + y0) = π by symmetry
        let m = q.integrate(&[0.0, 0.0], 1.0, |y| 1.0 + y[0]);
        assert_relative_eq!(m.value, std::f64::consts::PI, max_relative = 1e-2);
    }
}
