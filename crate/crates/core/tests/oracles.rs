//! Critical levels against a rebuild-and-bisect oracle.

mod common;

use rgg_core::density::{Density, Marginal, MassRadii, Tolerances};
use rgg_core::graph::{build_digraph, enhance};
use rgg_core::norm::{Norm, NormSpec};
use rgg_core::sampling::{replicate_seed, sample_process, SampleSpec};
use rgg_core::stats::{count_isolated, count_zero_outdegree, critical_cutoffs};

const N: f64 = 300.0;

fn product2() -> (Density, NormSpec) {
    (
        Density::product(vec![
            Marginal::Triangular {
                lo: 0.0,
                mode: 0.2,
                hi: 1.0,
            },
            Marginal::TruncatedExponential { rate: 2.0 },
        ])
        .unwrap(),
        NormSpec::new(Norm::LInf, 2).unwrap(),
    )
}

#[test]
fn oracle_solver_matches_closed_form() {
    let (d, norm) = common::uniform2();
    for (x, t) in [([0.5, 0.5], 0.01), ([0.02, 0.9], 0.003), ([0.0, 0.0], 0.2)] {
        let r = common::oracle_radius(&d, &norm, &x, t);
        // Closed form of the clipped square mass when the ball stays inside.
        if x == [0.5, 0.5] {
            assert!((r - 0.05).abs() < 1e-12, "{r}");
        }
        assert!((d.ball_measure(&norm, &x, r).unwrap() / t - 1.0).abs() <= 2.0 * common::ORACLE_MASS_REL);
        assert!((common::library_radius(&d, &norm, &x, t) / r - 1.0).abs() < 1e-9);
    }
}

#[test]
fn cutoffs_match_oracle() {
    let tol = Tolerances::default();
    for (case, (d, norm)) in [common::uniform2(), product2()].into_iter().enumerate() {
        for rep in 0..25 {
            let s = sample_process(&d, SampleSpec::new(N, replicate_seed(31, case, rep))).unwrap();
            let cut = critical_cutoffs(&s.points, N, &d, &norm, &tol).unwrap();
            let (d_n, d_tilde) = common::oracle_cutoffs(&s.points, N, &d, &norm, 1e-8);
            let lib = (cut.d_n.value().unwrap(), cut.d_tilde_n.value().unwrap());
            assert!(
                (lib.0 / d_n - 1.0).abs() <= 1e-6,
                "case {case} rep {rep}: d_n {} vs {d_n}",
                lib.0
            );
            assert!(
                (lib.1 / d_tilde - 1.0).abs() <= 1e-6,
                "case {case} rep {rep}: d̃_n {} vs {d_tilde}",
                lib.1
            );
        }
    }
}

#[test]
fn levels_are_sharp_thresholds() {
    let tol = Tolerances::default();
    for (case, (d, norm)) in [common::uniform2(), product2()].into_iter().enumerate() {
        for rep in 0..10 {
            let s = sample_process(&d, SampleSpec::new(N, replicate_seed(32, case, rep))).unwrap();
            let cut = critical_cutoffs(&s.points, N, &d, &norm, &tol).unwrap();
            let counts = |c: f64| {
                let r = MassRadii::for_c(&d, norm, c, N, &tol)
                    .unwrap()
                    .radii(s.points.coords())
                    .unwrap();
                let g = build_digraph(&s.points, &r, &norm).unwrap();
                (count_zero_outdegree(&g), count_isolated(&enhance(&g)))
            };
            let d_n = cut.d_n.value().unwrap();
            let d_tilde = cut.d_tilde_n.value().unwrap();
            assert_eq!(counts(d_n * (1.0 + 1e-4)).0, 0);
            assert!(counts(d_n * (1.0 - 1e-4)).0 >= 1);
            assert_eq!(counts(d_tilde * (1.0 + 1e-4)).1, 0);
            assert!(counts(d_tilde * (1.0 - 1e-4)).1 >= 1);
        }
    }
}

#[test]
fn per_vertex_levels_recover_radii() {
    let (d, norm) = common::interior2();
    let tol = Tolerances::default();
    let n = 200.0;
    let s = sample_process(&d, SampleSpec::new(n, 33)).unwrap();
    let cut = critical_cutoffs(&s.points, n, &d, &norm, &tol).unwrap();
    let max_level = cut.levels.iter().cloned().fold(0.0, f64::max);
    assert_eq!(cut.d_n.value(), Some(max_level));
    for (i, x) in s.points.iter().enumerate().take(40) {
        // At its own level a vertex's ball just reaches its nearest neighbour.
        let r = common::oracle_radius(&d, &norm, x, cut.levels[i] * n.ln() / n);
        let nearest = s
            .points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, y)| norm.distance(x, y))
            .fold(f64::INFINITY, f64::min);
        assert!((r / nearest - 1.0).abs() < 1e-6, "vertex {i}: {r} vs {nearest}");
    }
}
