//! Inversion of r ↦ F(B(x, r)) and the cut-off radii built on it.

use serde::{Deserialize, Serialize};

use super::{Density, DensityKind, MassPath};
use crate::error::{Error, Result};
use crate::norm::{Norm, NormSpec};

/// Mass tolerances for the radius solvers, relative to the target mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub closed_form_rel: f64,
    pub quadrature_rel: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed_form_rel: 1e-8,
            quadrature_rel: 1e-5,
            max_iter: 200,
        }
    }
}

impl Tolerances {
    pub fn mass_rel(&self, path: MassPath) -> f64 {
        match path {
            MassPath::ClosedForm => self.closed_form_rel,
            MassPath::RadialQuadrature | MassPath::QuasiMonteCarlo => self.quadrature_rel,
        }
    }

    /// Absolute mass tolerance for `target` on the given evaluation path.
    pub fn mass_abs(&self, density: &Density, norm: &NormSpec, target: f64) -> f64 {
        self.mass_rel(density.mass_path(norm)) * target
    }
}

/// Once the mass criterion is met the bracket is still shrunk to this
/// relative width whenever the lower end is also within tolerance, so that
/// flat stretches of F resolve to their left end.
const FLAT_WIDTH: f64 = 1e-12;

/// Smallest radius r with |F(B(x, r)) − target| ≤ tol.
///
/// Bisection on the predicate F(B(x, r)) ≥ target, bracketed from the warm
/// start (target / (f(x) θ_d))^{1/d}. When F jumps across the target (only
/// possible for discontinuous densities under quasi-Monte Carlo integration)
/// the bracket collapses and the upper end is returned.
pub fn radius_for_mass(density: &Density, norm: &NormSpec, x: &[f64], target: f64, tol: f64) -> Result<f64> {
    radius_for_mass_iter(density, norm, x, target, tol, Tolerances::default().max_iter)
}

pub(crate) fn radius_for_mass_iter(
    density: &Density,
    norm: &NormSpec,
    x: &[f64],
    target: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    density.check_norm(norm)?;
    density.check_point(x)?;
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target mass must be in (0, 1], got {target}"
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    if let (DensityKind::UniformCube, Norm::LInf) = (density.kind(), norm.norm) {
        let r = 0.5 * target.powf(1.0 / norm.dim as f64);
        if x.iter().all(|&v| v >= r && v <= 1.0 - r) {
            return Ok(r);
        }
    }

    let mass = |r: f64| density.ball_measure_unchecked(norm, x, r).value;
    let reach = density.reach_radius(norm, x);
    let total = mass(reach);
    if total < target - tol {
        return Err(Error::TargetUnreachable {
            target,
            reachable: total,
        });
    }

    let fx = density.pdf_unchecked(x);
    let level = if fx > 0.0 { fx } else { density.f_bounds().1 };
    let d = norm.dim as f64;
    let r0 = (target / (level * norm.theta)).powf(1.0 / d).min(reach);

    // Bracket: F(lo) < target ≤ F(hi).
    let (mut lo, mut f_lo, mut hi, mut f_hi);
    let f0 = mass(r0);
    if f0 >= target {
        hi = r0;
        f_hi = f0;
        lo = 0.0;
        f_lo = 0.0;
        let mut r = r0;
        for _ in 0..64 {
            r *= 0.5;
            let f = mass(r);
            if f >= target {
                hi = r;
                f_hi = f;
            } else {
                lo = r;
                f_lo = f;
                break;
            }
        }
    } else {
        lo = r0;
        f_lo = f0;
        let mut r = r0;
        loop {
            r = (2.0 * r).min(reach);
            let f = mass(r);
            if f >= target {
                hi = r;
                f_hi = f;
                break;
            }
            if r >= reach {
                // total ≥ target − tol: the full support is within tolerance.
                return Ok(reach);
            }
            lo = r;
            f_lo = f;
        }
        if !(hi > lo) {
            return Err(Error::NonBracketing { target, radius: hi });
        }
    }

    for _ in 0..max_iter {
        let converged = f_hi - target <= tol;
        if converged && (target - f_lo > tol || hi - lo <= FLAT_WIDTH * hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let f = mass(mid);
        if f >= target {
            hi = mid;
            f_hi = f;
        } else {
            lo = mid;
            f_lo = f;
        }
    }

    if density.mass_path(norm) == MassPath::QuasiMonteCarlo {
        let est = density.ball_measure_unchecked(norm, x, hi);
        let allowed = density.integration().rel_tol * est.value.max(1e-300);
        if est.error > allowed {
            return Err(Error::Integration {
                achieved: est.error,
                tolerance: allowed,
            });
        }
    }
    Ok(hi)
}

/// c · log n / n, validated as a probability mass.
pub fn fixed_c_mass(c: f64, n: f64) -> Result<f64> {
    if !(n > 1.0) {
        return Err(Error::InvalidParameter(format!("intensity must exceed 1, got {n}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    let t = c * n.ln() / n;
    if t > 1.0 {
        return Err(Error::InvalidParameter(format!("c log n / n = {t} exceeds 1")));
    }
    Ok(t)
}

/// (log n + β) / n; rejects log n + β ≤ 0.
pub fn beta_mass(beta: f64, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("intensity must be positive, got {n}")));
    }
    let level = n.ln() + beta;
    if !(level > 0.0) {
        return Err(Error::NonPositiveLevel { n, beta });
    }
    let t = level / n;
    if t > 1.0 {
        return Err(Error::InvalidParameter(format!("(log n + beta) / n = {t} exceeds 1")));
    }
    Ok(t)
}

/// r_n(c, x): the radius whose ball carries mass c · log n / n.
pub fn cutoff_radius(density: &Density, norm: &NormSpec, x: &[f64], c: f64, n: f64, tol: &Tolerances) -> Result<f64> {
    let t = fixed_c_mass(c, n)?;
    radius_for_mass_iter(density, norm, x, t, tol.mass_abs(density, norm, t), tol.max_iter)
}

/// r̂_n(β, x): the radius whose ball carries mass (log n + β) / n.
pub fn poisson_cutoff_radius(
    density: &Density,
    norm: &NormSpec,
    x: &[f64],
    beta: f64,
    n: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let t = beta_mass(beta, n)?;
    radius_for_mass_iter(density, norm, x, t, tol.mass_abs(density, norm, t), tol.max_iter)
}

/// Radius solver for many points at one target mass.
///
/// For a Euclidean-radial density with Euclidean balls the radius depends on
/// ‖x‖ only, so it is tabulated once over ‖x‖ ∈ [0, 1] and interpolated; the
/// table is refined until the mass error at every interval midpoint is below
/// half the tolerance. Other pairs solve each point directly.
#[derive(Debug, Clone)]
pub struct MassRadii<'a> {
    density: &'a Density,
    norm: NormSpec,
    target: f64,
    tol: f64,
    max_iter: usize,
    table: Option<RadiusTable>,
}

#[derive(Debug, Clone)]
struct RadiusTable {
    s: Vec<f64>,
    r: Vec<f64>,
}

impl RadiusTable {
    fn eval(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let k = self.s.partition_point(|v| *v <= s).clamp(1, self.s.len() - 1);
        let (s0, s1) = (self.s[k - 1], self.s[k]);
        let w = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
        self.r[k - 1] + w * (self.r[k] - self.r[k - 1])
    }
}

const TABLE_START: usize = 64;
const TABLE_MIN_STEP: f64 = 1e-9;

impl<'a> MassRadii<'a> {
    pub fn new(density: &'a Density, norm: NormSpec, target: f64, tol: &Tolerances) -> Result<Self> {
        density.check_norm(&norm)?;
        let abs_tol = tol.mass_abs(density, &norm, target);
        let mut solver = Self {
            density,
            norm,
            target,
            tol: abs_tol,
            max_iter: tol.max_iter,
            table: None,
        };
        if let DensityKind::Radial(r) = density.kind() {
            if r.norm() == Norm::L2 && norm.norm == Norm::L2 && norm.dim >= 2 {
                solver.table = Some(solver.build_table()?);
            }
        }
        Ok(solver)
    }

    pub fn for_c(density: &'a Density, norm: NormSpec, c: f64, n: f64, tol: &Tolerances) -> Result<Self> {
        Self::new(density, norm, fixed_c_mass(c, n)?, tol)
    }

    pub fn for_beta(density: &'a Density, norm: NormSpec, beta: f64, n: f64, tol: &Tolerances) -> Result<Self> {
        Self::new(density, norm, beta_mass(beta, n)?, tol)
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    fn solve_direct(&self, x: &[f64]) -> Result<f64> {
        radius_for_mass_iter(self.density, &self.norm, x, self.target, self.tol, self.max_iter)
    }

    fn axis_point(&self, s: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.norm.dim];
        x[0] = s;
        x
    }

    fn build_table(&self) -> Result<RadiusTable> {
        // Solve nodes slightly tighter than the overall tolerance so that
        // interpolation has room for the other half.
        let node_tol = 0.25 * self.tol;
        let solve = |s: f64| {
            radius_for_mass_iter(
                self.density,
                &self.norm,
                &self.axis_point(s),
                self.target,
                node_tol,
                self.max_iter,
            )
        };
        let mut s: Vec<f64> = (0..=TABLE_START).map(|i| i as f64 / TABLE_START as f64).collect();
        let mut r = s.iter().map(|&v| solve(v)).collect::<Result<Vec<_>>>()?;
        loop {
            let mut next_s = Vec::with_capacity(2 * s.len());
            let mut next_r = Vec::with_capacity(2 * s.len());
            let mut refined = false;
            for k in 0..s.len() - 1 {
                next_s.push(s[k]);
                next_r.push(r[k]);
                let mid = 0.5 * (s[k] + s[k + 1]);
                if s[k + 1] - s[k] < TABLE_MIN_STEP {
                    continue;
                }
                let guess = 0.5 * (r[k] + r[k + 1]);
                let mass = self
                    .density
                    .ball_measure_unchecked(&self.norm, &self.axis_point(mid), guess)
                    .value;
                if (mass - self.target).abs() > 0.5 * self.tol {
                    next_s.push(mid);
                    next_r.push(solve(mid)?);
                    refined = true;
                }
            }
            next_s.push(s[s.len() - 1]);
            next_r.push(r[r.len() - 1]);
            s = next_s;
            r = next_r;
            if !refined {
                break;
            }
        }
        log::debug!("radius table with {} nodes for target {:.3e}", s.len(), self.target);
        Ok(RadiusTable { s, r })
    }

    pub fn radius(&self, x: &[f64]) -> Result<f64> {
        self.density.check_point(x)?;
        match &self.table {
            Some(table) => {
                let s = self.norm.length(x);
                if s > 1.0 {
                    return self.solve_direct(x);
                }
                Ok(table.eval(s))
            }
            None => self.solve_direct(x),
        }
    }

    /// Radii for a flat coordinate buffer, in parallel; errors carry the vertex index.
    pub fn radii(&self, coords: &[f64]) -> Result<Vec<f64>> {
        use rayon::prelude::*;
        let d = self.norm.dim;
        coords
            .par_chunks_exact(d)
            .enumerate()
            .map(|(i, x)| self.radius(x).map_err(|e| e.at_vertex(i)))
            .collect()
    }
}
