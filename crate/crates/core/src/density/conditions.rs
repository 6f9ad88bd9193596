//! Masses of the regions appearing in the Poisson-limit conditions, and a
//! finite-grid check of those conditions.

use serde::{Deserialize, Serialize};

use super::solve::{beta_mass, poisson_cutoff_radius, Tolerances};
use super::{Density, DensityKind, MassPath};
use crate::error::{Error, Result};
use crate::norm::{Norm, NormSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// {y : ‖x − y‖ ≤ r̂(x) + r̂(y)}
    A,
    /// {y ∈ A(x) : max(r̂(x), r̂(y)) ≤ ‖x − y‖}
    AHat,
    /// B(y, r̂(y)) \ B(x, r̂(x))
    K,
    /// B(x, 2 r̂(x))
    DoubleBall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionProbe {
    pub x: Vec<f64>,
    /// Second point; only read for [`RegionKind::K`].
    pub y: Vec<f64>,
    pub kind: RegionKind,
}

impl RegionProbe {
    pub fn new(kind: RegionKind, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y, kind }
    }
}

/// Evaluates r̂_n(β, ·) for one (density, norm, n, β).
struct Rhat<'a> {
    density: &'a Density,
    norm: &'a NormSpec,
    n: f64,
    beta: f64,
    tol: &'a Tolerances,
}

impl Rhat<'_> {
    fn at(&self, z: &[f64]) -> Result<f64> {
        poisson_cutoff_radius(self.density, self.norm, z, self.beta, self.n, self.tol)
    }
}

/// F of the probed region.
///
/// K uses F(B(y, r̂(y))) = target minus the mass of the lens
/// B(x, r̂(x)) ∩ B(y, r̂(y)), computed in closed form for product densities
/// under ℓ_∞, by arc quadrature for Euclidean-radial densities in the plane,
/// and by quasi-Monte Carlo otherwise. A and Â integrate their membership
/// predicate (which needs r̂ at every integration point) by quasi-Monte Carlo.
pub fn region_measure(
    density: &Density,
    norm: &NormSpec,
    probe: &RegionProbe,
    n: f64,
    beta: f64,
    tol: &Tolerances,
) -> Result<f64> {
    density.check_norm(norm)?;
    density.check_point(&probe.x)?;
    let target = beta_mass(beta, n)?;
    let rhat = Rhat {
        density,
        norm,
        n,
        beta,
        tol,
    };
    let rx = rhat.at(&probe.x)?;
    match probe.kind {
        RegionKind::DoubleBall => density.ball_measure(norm, &probe.x, 2.0 * rx),
        RegionKind::K => {
            density.check_point(&probe.y)?;
            if probe.x == probe.y {
                return Ok(0.0);
            }
            let ry = rhat.at(&probe.y)?;
            let lens = lens_measure(density, norm, &probe.x, rx, &probe.y, ry)?;
            Ok((target - lens).max(0.0))
        }
        RegionKind::A | RegionKind::AHat => {
            let reach = rx + max_rhat(&rhat)?;
            let qmc = density.qmc_ball(norm);
            let mut failure = None;
            let est = qmc.integrate(&probe.x, reach, |y| {
                let fy = density.pdf_unchecked(y);
                if fy == 0.0 || failure.is_some() {
                    return 0.0;
                }
                let ry = match rhat.at(y) {
                    Ok(r) => r,
                    Err(e) => {
                        failure = Some(e);
                        return 0.0;
                    }
                };
                let dist = norm.distance(&probe.x, y);
                let inside = dist <= rx + ry && (probe.kind == RegionKind::A || rx.max(ry) <= dist);
                if inside {
                    fy
                } else {
                    0.0
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(est.value.clamp(0.0, 1.0))
        }
    }
}

/// Coarse upper estimate of sup r̂ over the support: the largest value on a
/// grid that includes the bounding-box corners, with a safety factor.
fn max_rhat(rhat: &Rhat<'_>) -> Result<f64> {
    let (lo, hi) = rhat.density.support_bbox();
    let d = lo.len();
    let steps = 8usize;
    let total = (steps + 1).pow(d as u32);
    let mut x = vec![0.0; d];
    let mut best: f64 = 0.0;
    for idx in 0..total {
        let mut rem = idx;
        for k in 0..d {
            let i = rem % (steps + 1);
            rem /= steps + 1;
            x[k] = lo[k] + (hi[k] - lo[k]) * i as f64 / steps as f64;
        }
        if !rhat.density.in_support_closure(&x) {
            continue;
        }
        best = best.max(rhat.at(&x)?);
    }
    Ok(1.5 * best)
}

fn lens_measure(density: &Density, norm: &NormSpec, x: &[f64], rx: f64, y: &[f64], ry: f64) -> Result<f64> {
    if norm.distance(x, y) > rx + ry {
        return Ok(0.0);
    }
    if density.mass_path(norm) == MassPath::ClosedForm {
        let marginals = density.marginals().ok_or(Error::NotProductDensity)?;
        let mass = marginals
            .iter()
            .zip(x.iter().zip(y))
            .map(|(m, (a, b))| {
                let lo = (a - rx).max(b - ry);
                let hi = (a + rx).min(b + ry);
                if hi > lo {
                    m.cdf(hi) - m.cdf(lo)
                } else {
                    0.0
                }
            })
            .product();
        return Ok(mass);
    }
    if let DensityKind::Radial(r) = density.kind() {
        if r.norm() == Norm::L2 && norm.norm == Norm::L2 && norm.dim == 2 {
            return Ok(r.lens_measure_l2_2d(x, rx, y, ry));
        }
    }
    let est = density.qmc_ball(norm).integrate(y, ry, |z| {
        if norm.distance(x, z) <= rx {
            density.pdf_unchecked(z)
        } else {
            0.0
        }
    });
    Ok(est.value.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub n: f64,
    /// Grid points x that were evaluated.
    pub x_points: usize,
    /// (x, y) pairs with y in Â_n(x) that were evaluated.
    pub pairs: usize,
    /// inf F(K_n(x, y)) · n / (log n + β) over the grid.
    pub k_ratio_min: f64,
    pub k_ratio_argmin: Option<(Vec<f64>, Vec<f64>)>,
    /// sup F(B(x, 2 r̂_n(x))) · n^{1 − α} over the grid.
    pub double_ball_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub alpha: f64,
    pub beta: f64,
    pub grid_size: usize,
    pub rows: Vec<ConditionRow>,
    /// Every row has k_ratio_min ≥ α.
    pub k_condition_holds: bool,
    /// double_ball_sup strictly decreases along the intensities.
    pub double_ball_decreasing: bool,
    pub note: String,
}

const PROBE_DISTANCES: usize = 9;

/// Finite-grid check of the lower bound on F(K_n(x, y)) and the decay of
/// F(B(x, 2 r̂_n(x))). x ranges over cell centres of a `grid_size`^d grid on
/// the support's bounding box (kept only inside the support); y ranges over
/// directions from {−2, …, 2}^d at distances between r̂(x) and 3 r̂(x),
/// filtered to Â_n(x).
pub fn verify_poisson_conditions(
    density: &Density,
    norm: &NormSpec,
    alpha: f64,
    beta: f64,
    n_list: &[f64],
    grid_size: usize,
    tol: &Tolerances,
) -> Result<ConditionReport> {
    density.check_norm(norm)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if grid_size == 0 {
        return Err(Error::InvalidParameter("grid_size must be at least 1".into()));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "n_list must be non-empty and strictly increasing".into(),
        ));
    }
    let d = norm.dim;
    let xs = grid_points(density, grid_size);
    let directions = probe_directions(norm);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let target = beta_mass(beta, n)?;
        let rhat = Rhat {
            density,
            norm,
            n,
            beta,
            tol,
        };
        let scale = n / (n.ln() + beta);
        let mut row = ConditionRow {
            n,
            x_points: xs.len(),
            pairs: 0,
            k_ratio_min: f64::INFINITY,
            k_ratio_argmin: None,
            double_ball_sup: 0.0,
        };
        let mut y = vec![0.0; d];
        for x in &xs {
            let rx = rhat.at(x)?;
            let double = density.ball_measure(norm, x, 2.0 * rx)?;
            row.double_ball_sup = row.double_ball_sup.max(double * n.powf(1.0 - alpha));
            for dir in &directions {
                for step in 0..PROBE_DISTANCES {
                    let dist = rx * (1.0 + 2.0 * step as f64 / (PROBE_DISTANCES - 1) as f64);
                    for k in 0..d {
                        y[k] = x[k] + dist * dir[k];
                    }
                    if !density.in_support_closure(&y) || density.pdf_unchecked(&y) == 0.0 {
                        continue;
                    }
                    let ry = rhat.at(&y)?;
                    let gap = norm.distance(x, &y);
                    if !(rx.max(ry) <= gap && gap <= rx + ry) {
                        continue;
                    }
                    let lens = lens_measure(density, norm, x, rx, &y, ry)?;
                    let ratio = (target - lens).max(0.0) * scale;
                    row.pairs += 1;
                    if ratio < row.k_ratio_min {
                        row.k_ratio_min = ratio;
                        row.k_ratio_argmin = Some((x.clone(), y.clone()));
                    }
                }
            }
        }
        rows.push(row);
    }
    let k_condition_holds = rows.iter().all(|r| r.k_ratio_min >= alpha);
    let double_ball_decreasing = rows.windows(2).all(|w| w[1].double_ball_sup < w[0].double_ball_sup);
    Ok(ConditionReport {
        alpha,
        beta,
        grid_size,
        rows,
        k_condition_holds,
        double_ball_decreasing,
        note: "heuristic finite-grid check of asymptotic conditions; not a proof".into(),
    })
}

fn grid_points(density: &Density, grid_size: usize) -> Vec<Vec<f64>> {
    let (lo, hi) = density.support_bbox();
    let d = lo.len();
    let total = grid_size.pow(d as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let x: Vec<f64> = (0..d)
            .map(|k| {
                let i = rem % grid_size;
                rem /= grid_size;
                lo[k] + (hi[k] - lo[k]) * (i as f64 + 0.5) / grid_size as f64
            })
            .collect();
        if density.in_support_closure(&x) && density.pdf_unchecked(&x) > 0.0 {
            out.push(x);
        }
    }
    out
}

/// Non-zero vectors of {−2, …, 2}^d scaled to unit length in `norm`.
fn probe_directions(norm: &NormSpec) -> Vec<Vec<f64>> {
    let d = norm.dim;
    let total = 5usize.pow(d as u32);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let v: Vec<f64> = (0..d)
            .map(|_| {
                let i = rem % 5;
                rem /= 5;
                i as f64 - 2.0
            })
            .collect();
        let len = norm.length(&v);
        if len == 0.0 {
            continue;
        }
        let u: Vec<f64> = v.iter().map(|c| c / len).collect();
        if !out.iter().any(|w| w.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-12)) {
            out.push(u);
        }
    }
    out
}
