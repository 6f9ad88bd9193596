//! Exact critical cut-off parameters of a realization.
//!
//! A vertex has zero out-degree at level c exactly when c log n / n is
//! below the mass of the ball reaching its nearest neighbour, so d_n is
//! (n / log n) times the largest such mass. In the symmetrized graph vertex i
//! is isolated exactly when c log n / n is below
//! min_j min(F(B(X_i, D_ij)), F(B(X_j, D_ij))).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{Density, MassRadii, Tolerances};
use crate::error::{Error, Result};
use crate::graph::GridIndex;
use crate::norm::NormSpec;
use crate::sampling::PointSet;

/// A critical level, or the marker for a realization where no level works.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Value(f64),
    /// Fewer than two points: some vertex stays isolated at every level.
    Unattainable,
}

impl Cutoff {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Cutoff::Value(v) => Some(v),
            Cutoff::Unattainable => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffResult {
    pub d_n: Cutoff,
    pub d_tilde_n: Cutoff,
    /// Per vertex: the smallest c at which it has an out-neighbour.
    pub levels: Vec<f64>,
    /// Per vertex: the smallest c at which it is not isolated after symmetrization.
    pub enhanced_levels: Vec<f64>,
}

fn scale(n: f64) -> Result<f64> {
    if !(n > 1.0) {
        return Err(Error::InvalidParameter(format!("intensity must exceed 1, got {n}")));
    }
    Ok(n / n.ln())
}

/// Nearest-neighbour distance and its ball mass F(B(X_i, D_i)) for every vertex.
fn nearest_masses(points: &PointSet, density: &Density, norm: &NormSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let count = points.len();
    // Cell side near the typical spacing of `count` points in the bounding box.
    let grid = GridIndex::new(points, grid_spacing(points));
    let pairs: Vec<(f64, f64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (_, dist) = grid.nearest(points, norm, i).expect("at least two points");
            let mass = density
                .ball_measure(norm, points.point(i), dist)
                .map_err(|e| e.at_vertex(i))?;
            Ok((dist, mass))
        })
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

fn grid_spacing(points: &PointSet) -> f64 {
    let d = points.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points.iter() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a).max(1e-12)).product();
    (volume / points.len() as f64).powf(1.0 / d as f64)
}

/// d_n with per-vertex levels; `Unattainable` when there are fewer than two points.
pub fn critical_cutoff(points: &PointSet, n: f64, density: &Density, norm: &NormSpec) -> Result<(Cutoff, Vec<f64>)> {
    let s = scale(n)?;
    if points.len() < 2 {
        return Ok((Cutoff::Unattainable, vec![f64::INFINITY; points.len()]));
    }
    let (_, masses) = nearest_masses(points, density, norm)?;
    let levels: Vec<f64> = masses.iter().map(|m| m * s).collect();
    let d_n = levels.iter().cloned().fold(0.0, f64::max);
    Ok((Cutoff::Value(d_n), levels))
}

/// Both critical levels. Candidate pairs for the symmetrized level are
/// pruned with the radii r_j(U·(1 + 1e−3)), U the largest nearest-neighbour
/// mass: a partner j can only lower vertex i's level below F(B(X_i, D_i)) ≤ U
/// when D_ij < r_j(U).
pub fn critical_cutoffs(
    points: &PointSet,
    n: f64,
    density: &Density,
    norm: &NormSpec,
    tol: &Tolerances,
) -> Result<CutoffResult> {
    let s = scale(n)?;
    let count = points.len();
    if count < 2 {
        return Ok(CutoffResult {
            d_n: Cutoff::Unattainable,
            d_tilde_n: Cutoff::Unattainable,
            levels: vec![f64::INFINITY; count],
            enhanced_levels: vec![f64::INFINITY; count],
        });
    }
    let (_, masses) = nearest_masses(points, density, norm)?;
    let top = masses.iter().cloned().fold(0.0, f64::max);
    let prune_mass = (top * (1.0 + 1e-3)).min(1.0);
    let reach = MassRadii::new(density, *norm, prune_mass, tol)?.radii(points.coords())?;
    let rho_max = reach.iter().cloned().fold(0.0, f64::max);
    let grid = GridIndex::new(points, rho_max);

    let enhanced: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let x = points.point(i);
            let mut best = masses[i];
            let mut failure = None;
            grid.candidates(x, rho_max, |j| {
                if j == i || failure.is_some() {
                    return;
                }
                let y = points.point(j);
                let dist = norm.distance(x, y);
                if dist > reach[j] {
                    return;
                }
                match density.ball_measure(norm, y, dist) {
                    Ok(m) => best = best.min(m),
                    Err(e) => failure = Some(e.at_vertex(j)),
                }
            });
            match failure {
                Some(e) => Err(e),
                None => Ok(best),
            }
        })
        .collect::<Result<_>>()?;

    let levels: Vec<f64> = masses.iter().map(|m| m * s).collect();
    let enhanced_levels: Vec<f64> = enhanced.iter().map(|m| m * s).collect();
    let d_n = levels.iter().cloned().fold(0.0, f64::max);
    let d_tilde_n = enhanced_levels.iter().cloned().fold(0.0, f64::max);
    Ok(CutoffResult {
        d_n: Cutoff::Value(d_n),
        d_tilde_n: Cutoff::Value(d_tilde_n),
        levels,
        enhanced_levels,
    })
}

/// d̃_n alone.
pub fn critical_cutoff_enhanced(
    points: &PointSet,
    n: f64,
    density: &Density,
    norm: &NormSpec,
    tol: &Tolerances,
) -> Result<Cutoff> {
    Ok(critical_cutoffs(points, n, density, norm, tol)?.d_tilde_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::Norm;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_example() {
        let u = Density::uniform_cube(2).unwrap();
        let norm = NormSpec::new(Norm::LInf, 2).unwrap();
        let pts = PointSet::new(2, vec![0.25, 0.25, 0.75, 0.75]).unwrap();
        let r = critical_cutoffs(&pts, 2.0, &u, &norm, &Tolerances::default()).unwrap();
        let expected = 2.0 / 2f64.ln() * 0.5625;
        assert_relative_eq!(r.d_n.value().unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 1.62303, max_relative = 1e-5);
        assert_eq!(r.d_tilde_n, r.d_n);
    }

    #[test]
    fn single_point_is_unattainable() {
        let u = Density::uniform_cube(2).unwrap();
        let norm = NormSpec::new(Norm::LInf, 2).unwrap();
        let pts = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        let (d, _) = critical_cutoff(&pts, 10.0, &u, &norm).unwrap();
        assert_eq!(d, Cutoff::Unattainable);
        let r = critical_cutoffs(&pts, 10.0, &u, &norm, &Tolerances::default()).unwrap();
        assert_eq!(r.d_tilde_n, Cutoff::Unattainable);
    }

    #[test]
    fn enhanced_level_uses_the_partner_ball() {
        // Decreasing density: the ball of radius 1/2 around 0.5 covers the whole
        // support, while the same radius around the dense end point does not.
        let d = Density::product(vec![crate::density::Marginal::TruncatedExponential { rate: 3.0 }]).unwrap();
        let norm = NormSpec::new(Norm::LInf, 1).unwrap();
        let pts = PointSet::new(1, vec![0.0, 0.5]).unwrap();
        let r = critical_cutoffs(&pts, 50.0, &d, &norm, &Tolerances::default()).unwrap();
        let s = 50.0 / 50f64.ln();
        assert_relative_eq!(r.levels[1], s, max_relative = 1e-12);
        let near = (-1.5f64).exp_m1() / (-3f64).exp_m1();
        assert_relative_eq!(r.enhanced_levels[1], near * s, max_relative = 1e-12);
        assert_relative_eq!(r.d_tilde_n.value().unwrap(), near * s, max_relative = 1e-12);
    }
}
