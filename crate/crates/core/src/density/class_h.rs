//! Compactly supported densities that are positive except on finitely many
//! balls, near which they vanish at a polynomial rate.
//!
//! The density is a product of a constant background, an optional boundary
//! factor for ball-shaped supports, and one factor per hole. Each factor is 1
//! away from its patch and decays to 0 polynomially at the patch boundary, so
//! the composite is continuous inside the support. The overall constant is
//! fixed numerically at construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::numeric::halton;

/// One term w·t^p of a polynomial decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayTerm {
    pub weight: f64,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SupportShape {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Ball support whose density decays to zero at the outer sphere.
    Ball {
        center: Vec<f64>,
        radius: f64,
        terms: Vec<DecayTerm>,
    },
}

/// A vanishing patch: zero on B(center, radius) minus B(center, eta), rising
/// polynomially to the background between `radius` and `delta`. When
/// `eta > 0` the inner ball is an island whose density vanishes at `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub center: Vec<f64>,
    pub radius: f64,
    pub delta: f64,
    #[serde(default)]
    pub eta: f64,
    pub terms: Vec<DecayTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassHSpec {
    pub support: SupportShape,
    #[serde(default)]
    pub holes: Vec<Hole>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassH {
    spec: ClassHSpec,
    norm: Norm,
    dim: usize,
    amplitude: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

const NORMALIZER_POINTS: u64 = 1 << 18;

impl ClassH {
    pub fn new(mut spec: ClassHSpec, norm: Norm, dim: usize) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let (lo, hi) = match &mut spec.support {
            SupportShape::Box { lo, hi } => {
                if lo.len() != dim || hi.len() != dim || lo.iter().zip(hi.iter()).any(|(a, b)| a >= b) {
                    return bad("box support needs lo < hi in every coordinate".into());
                }
                (lo.clone(), hi.clone())
            }
            SupportShape::Ball { center, radius, terms } => {
                if center.len() != dim || *radius <= 0.0 {
                    return bad("ball support needs a centre of the right dimension and positive radius".into());
                }
                normalize_terms(terms)?;
                (
                    center.iter().map(|c| c - *radius).collect(),
                    center.iter().map(|c| c + *radius).collect(),
                )
            }
        };
        for hole in &mut spec.holes {
            if hole.center.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: hole.center.len(),
                });
            }
            if !(0.0 <= hole.eta && hole.eta < hole.radius && hole.radius < hole.delta) {
                return bad(format!(
                    "hole needs 0 <= eta < radius < delta, got eta={} radius={} delta={}",
                    hole.eta, hole.radius, hole.delta
                ));
            }
            normalize_terms(&mut hole.terms)?;
        }
        for (i, a) in spec.holes.iter().enumerate() {
            for b in &spec.holes[i + 1..] {
                if norm.distance(&a.center, &b.center) <= a.radius + b.radius {
                    return bad("hole balls must not intersect".into());
                }
            }
        }
        let mut density = Self {
            spec,
            norm,
            dim,
            amplitude: 1.0,
            lo,
            hi,
        };
        let integral = density.unnormalized_integral();
        if !(integral > 0.0) {
            return bad("class-H density has zero mass".into());
        }
        density.amplitude = 1.0 / integral;
        Ok(density)
    }

    pub fn spec(&self) -> &ClassHSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// Every factor is at most 1, so the amplitude bounds the density.
    pub fn f_max(&self) -> f64 {
        self.amplitude
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn in_support(&self, y: &[f64]) -> bool {
        match &self.spec.support {
            SupportShape::Box { lo, hi } => y.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= *a && *v <= *b),
            SupportShape::Ball { center, radius, .. } => self.norm.distance(y, center) <= *radius,
        }
    }

    #[inline]
    pub fn pdf(&self, y: &[f64]) -> f64 {
        self.amplitude * self.shape(y)
    }

    fn shape(&self, y: &[f64]) -> f64 {
        let mut value = match &self.spec.support {
            SupportShape::Box { lo, hi } => {
                if y.iter().zip(lo.iter().zip(hi)).any(|(v, (a, b))| v < a || v > b) {
                    return 0.0;
                }
                1.0
            }
            SupportShape::Ball { center, radius, terms } => {
                let rho = self.norm.distance(y, center);
                if rho > *radius {
                    return 0.0;
                }
                decay(terms, (radius - rho) / radius)
            }
        };
        for hole in &self.spec.holes {
            let rho = self.norm.distance(y, &hole.center);
            let factor = if rho >= hole.delta {
                1.0
            } else if rho > hole.radius {
                decay(&hole.terms, (rho - hole.radius) / (hole.delta - hole.radius))
            } else if rho >= hole.eta {
                0.0
            } else {
                decay(&hole.terms, (hole.eta - rho) / hole.eta)
            };
            value *= factor;
            if value == 0.0 {
                break;
            }
        }
        value
    }

    fn unnormalized_integral(&self) -> f64 {
        let volume: f64 = self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product();
        let mut u = vec![0.0; self.dim];
        let mut y = vec![0.0; self.dim];
        let mut sum = 0.0;
        for i in 0..NORMALIZER_POINTS {
            halton(i, self.dim, &mut u);
            for k in 0..self.dim {
                y[k] = self.lo[k] + u[k] * (self.hi[k] - self.lo[k]);
            }
            sum += self.shape(&y);
        }
        volume * sum / NORMALIZER_POINTS as f64
    }

    /// Largest |f(y) − f(y + h e_k)| / f_max over deterministic probes with
    /// both points inside the support.
    pub fn continuity_defect(&self, h: f64, probes: u64) -> f64 {
        let mut u = vec![0.0; self.dim];
        let mut y = vec![0.0; self.dim];
        let mut worst: f64 = 0.0;
        for i in 0..probes {
            halton(i, self.dim, &mut u);
            for k in 0..self.dim {
                y[k] = self.lo[k] + u[k] * (self.hi[k] - self.lo[k]);
            }
            if !self.in_support(&y) {
                continue;
            }
            let fy = self.pdf(&y);
            for k in 0..self.dim {
                let mut z = y.clone();
                z[k] += h;
                if self.in_support(&z) {
                    worst = worst.max((fy - self.pdf(&z)).abs());
                }
            }
        }
        worst / self.f_max()
    }
}

fn normalize_terms(terms: &mut [DecayTerm]) -> Result<()> {
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    if terms.is_empty() || terms.iter().any(|t| !(t.weight > 0.0)) || terms.iter().any(|t| t.power == 0) {
        return Err(Error::InvalidParameter(
            "decay terms need positive weights and powers >= 1".into(),
        ));
    }
    for t in terms.iter_mut() {
        t.weight /= total;
    }
    Ok(())
}

/// Σ w_j t^{p_j} with weights summing to one, so the value is 1 at t = 1.
#[inline]
fn decay(terms: &[DecayTerm], t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    terms.iter().map(|term| term.weight * t.powi(term.power as i32)).sum()
}
