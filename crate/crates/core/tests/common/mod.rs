//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use rgg_core::density::{radius_for_mass, Density};
use rgg_core::graph::{build_digraph, build_digraph_brute_force, enhance};
use rgg_core::norm::{Norm, NormSpec};
use rgg_core::sampling::PointSet;
use rgg_core::stats::{count_isolated, count_zero_outdegree};

pub fn uniform2() -> (Density, NormSpec) {
    (Density::uniform_cube(2).unwrap(), NormSpec::new(Norm::LInf, 2).unwrap())
}

/// A(1 − ‖x‖) on the Euclidean unit disc.
pub fn interior2() -> (Density, NormSpec) {
    (
        Density::radial_interior(2, 1, Norm::L2).unwrap(),
        NormSpec::new(Norm::L2, 2).unwrap(),
    )
}

/// Relative mass tolerance of the oracle radius solves.
pub const ORACLE_MASS_REL: f64 = 1e-12;

/// Root of F(B(x, r)) = t by the Illinois variant of regula falsi, kept
/// separate from the library's bisection solver.
pub fn oracle_radius(density: &Density, norm: &NormSpec, x: &[f64], t: f64) -> f64 {
    let tol = t * ORACLE_MASS_REL;
    let g = |r: f64| density.ball_measure(norm, x, r).unwrap() - t;
    let mut hi = 1e-3;
    while g(hi) < 0.0 {
        hi *= 2.0;
        assert!(hi < 1e6, "mass {t} unreachable from {x:?}");
    }
    let (mut a, mut ga) = (0.0, -t);
    let (mut b, mut gb) = (hi, g(hi));
    let mut last = 0i8;
    for _ in 0..500 {
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = g(c);
        if gc.abs() <= tol {
            return c;
        }
        if gc < 0.0 {
            (a, ga) = (c, gc);
            if last < 0 {
                gb *= 0.5;
            }
            last = -1;
        } else {
            (b, gb) = (c, gc);
            if last > 0 {
                ga *= 0.5;
            }
            last = 1;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    b
}

/// Radii at ball mass c log n / n, solved vertex by vertex without tables.
pub fn oracle_radii(points: &PointSet, density: &Density, norm: &NormSpec, c: f64, n: f64) -> Vec<f64> {
    let target = c * n.ln() / n;
    points.iter().map(|x| oracle_radius(density, norm, x, target)).collect()
}

/// The library solver at a tight tolerance, for cross-checking the oracle.
pub fn library_radius(density: &Density, norm: &NormSpec, x: &[f64], t: f64) -> f64 {
    radius_for_mass(density, norm, x, t, t * ORACLE_MASS_REL).unwrap()
}

/// (W, W̃) of the graphs rebuilt from scratch at level c.
pub fn isolated_at(points: &PointSet, density: &Density, norm: &NormSpec, c: f64, n: f64) -> (usize, usize) {
    let radii = oracle_radii(points, density, norm, c, n);
    let g = build_digraph_brute_force(points, &radii, norm).unwrap();
    (count_zero_outdegree(&g), count_isolated(&enhance(&g)))
}

/// Smallest c with `ok(c)`, for `ok` false at lo and true at hi, to relative width `rel`.
pub fn bisect_level(mut lo: f64, mut hi: f64, rel: f64, ok: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > rel * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Critical levels (d_n, d̃_n) found by bisection over c with a full rebuild
/// per probe. Brackets come from doubling and halving around c = 1.
pub fn oracle_cutoffs(points: &PointSet, n: f64, density: &Density, norm: &NormSpec, rel: f64) -> (f64, f64) {
    let w = |c: f64| isolated_at(points, density, norm, c, n);
    let (mut lo, mut hi) = (1.0, 1.0);
    while w(hi).0 > 0 {
        hi *= 2.0;
    }
    while w(lo).1 == 0 {
        lo *= 0.5;
    }
    let start = if hi > 1.0 { 0.5 * hi } else { lo };
    let d_n = bisect_level(start, hi, rel, |c| w(c).0 == 0);
    // d̃_n ≤ d_n since every directed edge survives symmetrization.
    let d_tilde = bisect_level(lo, d_n, rel, |c| w(c).1 == 0);
    (d_n, d_tilde)
}

/// Grid-index and brute-force edge sets coincide.
pub fn builders_agree(points: &PointSet, radii: &[f64], norm: &NormSpec) -> bool {
    let fast = build_digraph(points, radii, norm).unwrap();
    let slow = build_digraph_brute_force(points, radii, norm).unwrap();
    fast.edges().eq(slow.edges())
}
