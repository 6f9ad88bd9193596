mod common;

use proptest::prelude::*;
use rgg_core::density::{
    cutoff_radius, poisson_cutoff_radius, radius_for_mass, Density, Marginal, MassRadii, Tolerances,
};
use rgg_core::graph::{
    broadcast_radii, build_digraph, build_digraph_brute_force, enhance, is_connected, UndirectedGraph,
};
use rgg_core::norm::{Norm, NormSpec};
use rgg_core::sampling::{rng_from_seed, sample_iid, PointSet};
use rgg_core::stats::{
    count_isolated, count_zero_outdegree, critical_cutoffs, h_inverse, tv_distance_to_poisson, Branch,
};

fn density_case(k: usize) -> (Density, NormSpec) {
    let ns = |norm, d| NormSpec::new(norm, d).unwrap();
    match k {
        0 => (Density::uniform_cube(2).unwrap(), ns(Norm::LInf, 2)),
        1 => (
            Density::product(vec![
                Marginal::Power { k: 1.0 },
                Marginal::Triangular {
                    lo: 0.0,
                    mode: 0.3,
                    hi: 1.0,
                },
            ])
            .unwrap(),
            ns(Norm::LInf, 2),
        ),
        2 => (Density::radial_interior(2, 1, Norm::L2).unwrap(), ns(Norm::L2, 2)),
        _ => (Density::radial_edge(2, 0.4, 1, Norm::L2).unwrap(), ns(Norm::L2, 2)),
    }
}

/// A point of the support's bounding box from two unit coordinates.
fn place(density: &Density, u: [f64; 2]) -> Vec<f64> {
    let (lo, hi) = density.support_bbox();
    (0..2).map(|k| lo[k] + u[k] * (hi[k] - lo[k])).collect()
}

fn random_points(seed: u64, count: usize) -> PointSet {
    sample_iid(&Density::uniform_cube(2).unwrap(), count, &mut rng_from_seed(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ball_mass_is_monotone_in_radius(k in 0usize..4, u0 in 0.0..1.0f64, u1 in 0.0..1.0f64, r in 0.0..1.5f64, dr in 0.0..0.5f64) {
        let (d, norm) = density_case(k);
        let x = place(&d, [u0, u1]);
        let small = d.ball_measure(&norm, &x, r).unwrap();
        let large = d.ball_measure(&norm, &x, r + dr).unwrap();
        prop_assert!(small <= large + 1e-12, "{small} > {large}");
        prop_assert!((0.0..=1.0).contains(&small));
    }

    #[test]
    fn radius_inverts_mass(k in 0usize..4, u0 in 0.0..1.0f64, u1 in 0.0..1.0f64, log_t in -4.0..-0.3f64) {
        let (d, norm) = density_case(k);
        let x = place(&d, [u0, u1]);
        let t = 10f64.powf(log_t);
        let tol = Tolerances::default().mass_abs(&d, &norm, t);
        let r = radius_for_mass(&d, &norm, &x, t, tol).unwrap();
        prop_assert!((d.ball_measure(&norm, &x, r).unwrap() - t).abs() <= tol);
    }

    #[test]
    fn uniform_interior_radius_is_closed_form(c in 0.05..5.0f64, log_n in 3.0..7.0f64, u0 in 0.3..0.7f64, u1 in 0.3..0.7f64) {
        let n = 10f64.powf(log_n);
        let (d, norm) = density_case(0);
        let r = cutoff_radius(&d, &norm, &[u0, u1], c, n, &Tolerances::default()).unwrap();
        let exact = (c * n.ln() / (4.0 * n)).sqrt();
        prop_assume!(exact < 0.3);
        prop_assert!(((r - exact) / exact).abs() <= 1e-9);
    }

    #[test]
    fn beta_zero_is_c_one(k in 0usize..4, u0 in 0.0..1.0f64, u1 in 0.0..1.0f64, log_n in 2.0..6.0f64) {
        let (d, norm) = density_case(k);
        let x = place(&d, [u0, u1]);
        let n = 10f64.powf(log_n);
        let tol = Tolerances::default();
        prop_assert_eq!(
            poisson_cutoff_radius(&d, &norm, &x, 0.0, n, &tol).unwrap(),
            cutoff_radius(&d, &norm, &x, 1.0, n, &tol).unwrap()
        );
    }

    #[test]
    fn grid_builder_is_exact(seed in any::<u64>(), count in 1usize..400, norm in prop::sample::select(vec![Norm::L1, Norm::L2, Norm::LInf]), spread in 0.0..3.0f64) {
        let points = random_points(seed, count);
        let norm = NormSpec::new(norm, 2).unwrap();
        let mut rng = rng_from_seed(seed ^ 1);
        let radii: Vec<f64> = (0..count).map(|_| 0.05 * 10f64.powf(spread * (rand::Rng::random::<f64>(&mut rng) - 0.7))).collect();
        prop_assert!(common::builders_agree(&points, &radii, &norm));
    }

    #[test]
    fn larger_c_gives_a_supergraph(seed in any::<u64>(), k in 0usize..3, c1 in 0.2..3.0f64, dc in 0.01..2.0f64) {
        let (d, norm) = density_case(k);
        let points = sample_iid(&d, 300, &mut rng_from_seed(seed)).unwrap();
        let tol = Tolerances::default();
        let r1 = MassRadii::for_c(&d, norm, c1, 300.0, &tol).unwrap().radii(points.coords()).unwrap();
        let r2 = MassRadii::for_c(&d, norm, c1 + dc, 300.0, &tol).unwrap().radii(points.coords()).unwrap();
        prop_assert!(r1.iter().zip(&r2).all(|(a, b)| a <= b));
        let g1 = build_digraph(&points, &r1, &norm).unwrap();
        let g2 = build_digraph(&points, &r2, &norm).unwrap();
        let e2: std::collections::HashSet<_> = g2.edges().collect();
        prop_assert!(g1.edges().all(|e| e2.contains(&e)));
        prop_assert!(count_zero_outdegree(&g2) <= count_zero_outdegree(&g1));
    }

    #[test]
    fn enhancement_degrees_are_ordered(seed in any::<u64>(), count in 2usize..300) {
        let points = random_points(seed, count);
        let norm = NormSpec::new(Norm::LInf, 2).unwrap();
        let mut rng = rng_from_seed(seed.wrapping_add(7));
        let radii: Vec<f64> = (0..count).map(|_| 0.2 * rand::Rng::random::<f64>(&mut rng)).collect();
        let g = build_digraph(&points, &radii, &norm).unwrap();
        let u = enhance(&g);
        let b = enhance(&build_digraph(&points, &broadcast_radii(&g), &norm).unwrap());
        for i in 0..count {
            prop_assert!(g.out_degree(i) <= u.degree(i));
            prop_assert!(u.degree(i) <= b.degree(i));
        }
        prop_assert!(count_isolated(&u) <= count_zero_outdegree(&g));
    }

    #[test]
    fn adding_edges_keeps_connectivity(seed in any::<u64>(), count in 2usize..60, extra in (0usize..60, 0usize..60)) {
        let points = random_points(seed, count);
        let norm = NormSpec::new(Norm::L2, 2).unwrap();
        let g = build_digraph(&points, &vec![0.3; count], &norm).unwrap();
        let u = enhance(&g);
        let (a, b) = (extra.0 % count, extra.1 % count);
        prop_assume!(a != b);
        let plus = UndirectedGraph::from_edges(count, u.edges().chain(std::iter::once((a.min(b), a.max(b)))));
        prop_assert!(!is_connected(&u) || is_connected(&plus));
    }

    #[test]
    fn tv_is_a_probability(counts in prop::collection::vec(0u64..50, 1..30), lambda in 0.01..20.0f64) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let tv = tv_distance_to_poisson(&counts, lambda).unwrap();
        prop_assert!((0.0..=1.0).contains(&tv));
    }

    #[test]
    fn h_inverse_branches(y in 0.0..10.0f64) {
        let a = h_inverse(y, Branch::Plus).unwrap();
        prop_assert!(a >= 1.0);
        prop_assert!((1.0 - a + a * a.ln() - y).abs() <= 1e-9);
        if y <= 1.0 {
            let b = h_inverse(y, Branch::Minus).unwrap();
            prop_assert!((0.0..=1.0).contains(&b));
            let hb = if b == 0.0 { 1.0 } else { 1.0 - b + b * b.ln() };
            prop_assert!((hb - y).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn isolated_count_falls_with_c(seed in any::<u64>(), k in 0usize..3) {
        let (d, norm) = density_case(k);
        let n = 400.0;
        let points = sample_iid(&d, 400, &mut rng_from_seed(seed)).unwrap();
        let tol = Tolerances::default();
        let mut last = usize::MAX;
        for step in 1..=12 {
            let c = 0.15 * step as f64;
            let r = MassRadii::for_c(&d, norm, c, n, &tol).unwrap().radii(points.coords()).unwrap();
            let w = count_zero_outdegree(&build_digraph_brute_force(&points, &r, &norm).unwrap());
            prop_assert!(w <= last);
            last = w;
        }
        let cut = critical_cutoffs(&points, n, &d, &norm, &tol).unwrap();
        prop_assert!(cut.d_tilde_n.value().unwrap() <= cut.d_n.value().unwrap());
        prop_assert!(cut.enhanced_levels.iter().zip(&cut.levels).all(|(e, l)| e <= l));
    }
}
