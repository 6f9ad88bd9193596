//! Density families, ball masses F(B(x, r)), and the implicit radius solvers.
//!
//! Ball masses are computed in closed form for product densities under the
//! ℓ_∞ norm (an ℓ_∞ ball is a box, so the mass factorizes into marginal CDF
//! differences), by a one-dimensional quadrature for radial densities under
//! the Euclidean norm, and by deterministic quasi-Monte Carlo otherwise.

mod class_h;
mod conditions;
mod integrate;
mod marginal;
mod radial;
mod solve;

use std::sync::OnceLock;

pub use class_h::{ClassH, ClassHSpec, DecayTerm, Hole, SupportShape};
pub use conditions::{
    region_measure, verify_poisson_conditions, ConditionReport, ConditionRow, RegionKind, RegionProbe,
};
pub use integrate::{IntegrationSettings, MassEstimate, QmcBall};
pub use marginal::Marginal;
pub use radial::{RadialDensity, RadialProfile};
pub use solve::{
    beta_mass, cutoff_radius, fixed_c_mass, poisson_cutoff_radius, radius_for_mass, MassRadii, Tolerances,
};

use crate::error::{Error, Result};
use crate::norm::{Norm, NormSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    /// Uniform on [0, 1]^d.
    UniformCube,
    Product(Vec<Marginal>),
    Radial(RadialDensity),
    ClassH(ClassH),
}

/// How [`Density::ball_measure`] evaluates a given (density, norm) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassPath {
    ClosedForm,
    /// One-dimensional deterministic quadrature (radial densities, Euclidean balls).
    RadialQuadrature,
    QuasiMonteCarlo,
}

/// A probability density on ℝ^d. Immutable once built; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Density {
    dim: usize,
    kind: DensityKind,
    integration: IntegrationSettings,
    qmc: [OnceLock<QmcBall>; 3],
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kind == other.kind && self.integration == other.integration
    }
}

impl Density {
    fn from_kind(dim: usize, kind: DensityKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self {
            dim,
            kind,
            integration: IntegrationSettings::default(),
            qmc: Default::default(),
        })
    }

    pub fn uniform_cube(dim: usize) -> Result<Self> {
        Self::from_kind(dim, DensityKind::UniformCube)
    }

    pub fn product(marginals: Vec<Marginal>) -> Result<Self> {
        for m in &marginals {
            m.validate()?;
        }
        Self::from_kind(marginals.len(), DensityKind::Product(marginals))
    }

    /// A(1 − ‖x‖)^p on the unit ball of `norm`.
    pub fn radial_interior(dim: usize, p: u32, norm: Norm) -> Result<Self> {
        let radial = RadialDensity::new(RadialProfile::Interior { p }, norm, dim)?;
        Self::from_kind(dim, DensityKind::Radial(radial))
    }

    /// A(‖x‖ − inner)^p outside B(0, inner), inside the unit ball of `norm`.
    pub fn radial_edge(dim: usize, inner: f64, p: u32, norm: Norm) -> Result<Self> {
        let radial = RadialDensity::new(RadialProfile::Edge { inner, p }, norm, dim)?;
        Self::from_kind(dim, DensityKind::Radial(radial))
    }

    pub fn class_h(dim: usize, spec: ClassHSpec, norm: Norm) -> Result<Self> {
        let h = ClassH::new(spec, norm, dim)?;
        Self::from_kind(dim, DensityKind::ClassH(h))
    }

    pub fn with_integration(mut self, settings: IntegrationSettings) -> Self {
        self.integration = settings;
        self.qmc = Default::default();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn integration(&self) -> &IntegrationSettings {
        &self.integration
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn check_norm(&self, norm: &NormSpec) -> Result<()> {
        if norm.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: norm.dim,
            });
        }
        Ok(())
    }

    /// f(x); exactly zero outside the support.
    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.pdf_unchecked(x))
    }

    #[inline]
    pub(crate) fn pdf_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            DensityKind::UniformCube => {
                if x.iter().all(|v| (0.0..=1.0).contains(v)) {
                    1.0
                } else {
                    0.0
                }
            }
            DensityKind::Product(ms) => ms.iter().zip(x).map(|(m, v)| m.pdf(*v)).product(),
            DensityKind::Radial(r) => r.pdf(x),
            DensityKind::ClassH(h) => h.pdf(x),
        }
    }

    /// Axis-aligned box containing the support.
    pub fn support_bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            DensityKind::UniformCube => (vec![0.0; self.dim], vec![1.0; self.dim]),
            DensityKind::Product(ms) => ms.iter().map(|m| m.support()).unzip(),
            DensityKind::Radial(_) => (vec![-1.0; self.dim], vec![1.0; self.dim]),
            DensityKind::ClassH(h) => {
                let (lo, hi) = h.bounding_box();
                (lo.to_vec(), hi.to_vec())
            }
        }
    }

    /// Membership in the closure of the support region.
    pub fn in_support_closure(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match &self.kind {
            DensityKind::UniformCube | DensityKind::Product(_) => {
                let (lo, hi) = self.support_bbox();
                x.iter().zip(lo.iter().zip(&hi)).all(|(v, (a, b))| v >= a && v <= b)
            }
            DensityKind::Radial(r) => {
                let s = r.norm().length(x);
                s <= 1.0 && s >= r.inner_radius()
            }
            DensityKind::ClassH(h) => h.in_support(x),
        }
    }

    /// Known (inf over support, sup) of the density.
    pub fn f_bounds(&self) -> (f64, f64) {
        match &self.kind {
            DensityKind::UniformCube => (1.0, 1.0),
            DensityKind::Product(ms) => (
                ms.iter().map(Marginal::pdf_min).product(),
                ms.iter().map(Marginal::pdf_max).product(),
            ),
            DensityKind::Radial(r) => (0.0, r.f_max()),
            DensityKind::ClassH(h) => (0.0, h.f_max()),
        }
    }

    /// Marginals when the density has product form.
    pub fn marginals(&self) -> Option<Vec<Marginal>> {
        match &self.kind {
            DensityKind::UniformCube => Some(vec![Marginal::Uniform { lo: 0.0, hi: 1.0 }; self.dim]),
            DensityKind::Product(ms) => Some(ms.clone()),
            _ => None,
        }
    }

    pub fn mass_path(&self, norm: &NormSpec) -> MassPath {
        match (&self.kind, norm.norm) {
            (DensityKind::UniformCube | DensityKind::Product(_), Norm::LInf) => MassPath::ClosedForm,
            (DensityKind::Radial(r), Norm::L2) if r.norm() == Norm::L2 => MassPath::RadialQuadrature,
            _ => MassPath::QuasiMonteCarlo,
        }
    }

    /// Radius from `x` that covers the whole support.
    pub fn reach_radius(&self, norm: &NormSpec, x: &[f64]) -> f64 {
        let (lo, hi) = self.support_bbox();
        let far: Vec<f64> = x
            .iter()
            .zip(lo.iter().zip(&hi))
            .map(|(v, (a, b))| (v - a).abs().max((b - v).abs()))
            .collect();
        norm.length(&far)
    }

    /// F(B(x, r)) = ∫_{B(x,r)} f.
    pub fn ball_measure(&self, norm: &NormSpec, x: &[f64], r: f64) -> Result<f64> {
        let estimate = self.ball_measure_estimate(norm, x, r)?;
        let tolerance = self.integration.rel_tol * estimate.value.max(1e-300);
        if estimate.error > tolerance {
            return Err(Error::Integration {
                achieved: estimate.error,
                tolerance,
            });
        }
        Ok(estimate.value)
    }

    /// Ball mass with its error estimate (zero for closed forms).
    pub fn ball_measure_estimate(&self, norm: &NormSpec, x: &[f64], r: f64) -> Result<MassEstimate> {
        self.check_norm(norm)?;
        self.check_point(x)?;
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be non-negative, got {r}")));
        }
        Ok(self.ball_measure_unchecked(norm, x, r))
    }

    pub(crate) fn ball_measure_unchecked(&self, norm: &NormSpec, x: &[f64], r: f64) -> MassEstimate {
        if r == 0.0 {
            return MassEstimate::exact(0.0);
        }
        match (&self.kind, self.mass_path(norm)) {
            (DensityKind::UniformCube, MassPath::ClosedForm) => MassEstimate::exact(
                x.iter()
                    .map(|&v| ((v + r).min(1.0) - (v - r).max(0.0)).max(0.0))
                    .product(),
            ),
            (DensityKind::Product(ms), MassPath::ClosedForm) => MassEstimate::exact(
                ms.iter()
                    .zip(x)
                    .map(|(m, &v)| (m.cdf(v + r) - m.cdf(v - r)).max(0.0))
                    .product(),
            ),
            (DensityKind::Radial(rd), MassPath::RadialQuadrature) => MassEstimate::exact(rd.ball_measure_l2(x, r)),
            (DensityKind::Radial(rd), _) if rd.norm() == norm.norm && x.iter().all(|v| *v == 0.0) => {
                MassEstimate::exact(rd.centered_ball_measure(r))
            }
            _ => {
                let qmc = self.qmc_ball(norm);
                let est = qmc.integrate(x, r, |y| self.pdf_unchecked(y));
                MassEstimate {
                    value: est.value.clamp(0.0, 1.0),
                    error: est.error,
                }
            }
        }
    }

    pub(crate) fn qmc_ball(&self, norm: &NormSpec) -> &QmcBall {
        let slot = match norm.norm {
            Norm::L1 => 0,
            Norm::L2 => 1,
            Norm::LInf => 2,
        };
        self.qmc[slot].get_or_init(|| QmcBall::new(norm, &self.integration))
    }

    /// Coordinatewise probability-integral transform (F_1(x_1), …, F_d(x_d)).
    pub fn h_transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        match &self.kind {
            DensityKind::UniformCube => Ok(x.iter().map(|v| v.clamp(0.0, 1.0)).collect()),
            DensityKind::Product(ms) => Ok(ms.iter().zip(x).map(|(m, v)| m.cdf(*v)).collect()),
            _ => Err(Error::NotProductDensity),
        }
    }
}
