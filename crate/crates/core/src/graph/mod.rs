//! Directed graphs with per-vertex radii, their symmetrizations, and connectivity.

mod export;
mod grid;
mod unionfind;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use export::{write_edges_csv, write_undirected_edges_csv, GraphSummary};
pub use grid::GridIndex;
pub use unionfind::UnionFind;

use crate::density::{Density, MassRadii, Tolerances};
use crate::error::{Error, Result};
use crate::norm::{Norm, NormSpec};
use crate::sampling::{PointSample, PointSet};

/// How per-vertex radii are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RadiusMode {
    /// Ball mass c · log n / n.
    FixedC { c: f64 },
    /// Ball mass (log n + β) / n.
    FixedBeta { beta: f64 },
    /// Radii that make the h-image of each ball cover a cube of half-side m_n(ε).
    Connectivity { epsilon: f64 },
}

impl RadiusMode {
    /// The mode's scalar parameter (c, β or ε).
    pub fn parameter(&self) -> f64 {
        match *self {
            RadiusMode::FixedC { c } => c,
            RadiusMode::FixedBeta { beta } => beta,
            RadiusMode::Connectivity { epsilon } => epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusAssignment {
    pub radii: Vec<f64>,
    pub mode: RadiusMode,
    pub n: f64,
    /// Set when the radii were raised by one broadcast round.
    #[serde(default)]
    pub broadcast: bool,
}

/// Radii for every vertex of `sample` under `mode`; deterministic given its inputs.
pub fn assign_radii(
    sample: &PointSample,
    density: &Density,
    norm: &NormSpec,
    mode: RadiusMode,
    tol: &Tolerances,
) -> Result<RadiusAssignment> {
    let n = sample.spec.n;
    let radii = match mode {
        RadiusMode::FixedC { c } => MassRadii::for_c(density, *norm, c, n, tol)?.radii(sample.points.coords())?,
        RadiusMode::FixedBeta { beta } => {
            MassRadii::for_beta(density, *norm, beta, n, tol)?.radii(sample.points.coords())?
        }
        RadiusMode::Connectivity { epsilon } => {
            return connectivity_radii(&sample.points, density, norm, epsilon, n);
        }
    };
    Ok(RadiusAssignment {
        radii,
        mode,
        n,
        broadcast: false,
    })
}

/// m(d) = max over 0 ≤ j ≤ d − 1 of 2^j (d − j) / d.
pub fn connectivity_constant(d: usize) -> f64 {
    (0..d)
        .map(|j| 2f64.powi(j as i32) * (d - j) as f64 / d as f64)
        .fold(0.0, f64::max)
}

/// m_n(ε) with m_n^d = (1 + ε) m log n / (n θ_d), θ_d = 2^d for ℓ_∞.
pub fn connectivity_half_side(d: usize, epsilon: f64, n: f64) -> f64 {
    let theta = 2f64.powi(d as i32);
    ((1.0 + epsilon) * connectivity_constant(d) * n.ln() / (n * theta)).powf(1.0 / d as f64)
}

/// Smallest ℓ_∞ radius r at each vertex x such that, in every coordinate,
/// [F_k(x_k − r), F_k(x_k + r)] covers [h_k(x) − m_n, h_k(x) + m_n] ∩ [0, 1].
pub fn connectivity_radii(
    points: &PointSet,
    density: &Density,
    norm: &NormSpec,
    epsilon: f64,
    n: f64,
) -> Result<RadiusAssignment> {
    if norm.norm != Norm::LInf {
        return Err(Error::UnsupportedNorm { required: "l_inf" });
    }
    let marginals = density.marginals().ok_or(Error::NotProductDensity)?;
    if points.dim() != density.dim() {
        return Err(Error::DimensionMismatch {
            expected: density.dim(),
            got: points.dim(),
        });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(n > 1.0) {
        return Err(Error::InvalidParameter(format!("intensity must exceed 1, got {n}")));
    }
    let m_n = connectivity_half_side(points.dim(), epsilon, n);
    let radii = points
        .iter()
        .map(|x| {
            x.iter()
                .zip(&marginals)
                .map(|(&v, m)| {
                    let u = m.cdf(v);
                    let left = v - m.inv_cdf((u - m_n).clamp(0.0, 1.0));
                    let right = m.inv_cdf((u + m_n).clamp(0.0, 1.0)) - v;
                    left.max(right).max(0.0)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(RadiusAssignment {
        radii,
        mode: RadiusMode::Connectivity { epsilon },
        n,
        broadcast: false,
    })
}

/// Directed graph with an edge i → j whenever ‖X_i − X_j‖ ≤ r_i, i ≠ j.
#[derive(Debug, Clone, PartialEq)]
pub struct DiGraph {
    norm: NormSpec,
    points: PointSet,
    radii: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl DiGraph {
    fn from_lists(norm: NormSpec, points: PointSet, radii: Vec<f64>, lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        for list in lists {
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Self {
            norm,
            points,
            radii,
            offsets,
            targets,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|i| self.out_degree(i)).collect()
    }

    /// Edges (i, j) in increasing order of i, then j.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |i| self.out_neighbors(i).iter().map(move |&j| (i, j as usize)))
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }
}

fn check_radii(points: &PointSet, radii: &[f64], norm: &NormSpec) -> Result<()> {
    if radii.len() != points.len() {
        return Err(Error::InvalidParameter(format!(
            "{} radii for {} points",
            radii.len(),
            points.len()
        )));
    }
    if points.dim() != norm.dim {
        return Err(Error::DimensionMismatch {
            expected: norm.dim,
            got: points.dim(),
        });
    }
    if let Some(i) = radii.iter().position(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(
            Error::InvalidParameter(format!("radius {} is not finite and non-negative", radii[i])).at_vertex(i),
        );
    }
    Ok(())
}

/// Builds the digraph through a grid index whose cell side is the largest radius.
pub fn build_digraph(points: &PointSet, radii: &[f64], norm: &NormSpec) -> Result<DiGraph> {
    check_radii(points, radii, norm)?;
    let cell = radii.iter().cloned().fold(0.0, f64::max);
    let grid = GridIndex::new(points, cell);
    let lists: Vec<Vec<u32>> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let x = points.point(i);
            let mut out: Vec<u32> = Vec::new();
            grid.candidates(x, radii[i], |j| {
                if j != i && norm.distance(points.point(j), x) <= radii[i] {
                    out.push(j as u32);
                }
            });
            out.sort_unstable();
            out
        })
        .collect();
    Ok(DiGraph::from_lists(*norm, points.clone(), radii.to_vec(), lists))
}

/// All-pairs construction; the reference for [`build_digraph`].
pub fn build_digraph_brute_force(points: &PointSet, radii: &[f64], norm: &NormSpec) -> Result<DiGraph> {
    check_radii(points, radii, norm)?;
    let lists = (0..points.len())
        .map(|i| {
            (0..points.len())
                .filter(|&j| j != i && norm.distance(points.point(i), points.point(j)) <= radii[i])
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    Ok(DiGraph::from_lists(*norm, points.clone(), radii.to_vec(), lists))
}

/// Undirected graph in compressed adjacency form; every edge is stored at both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl UndirectedGraph {
    pub fn from_edges(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); vertex_count];
        for (i, j) in edges {
            if i != j {
                lists[i].push(j as u32);
                lists[j].push(i as u32);
            }
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|i| self.degree(i)).collect()
    }

    /// Edges {i, j} with i < j, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j as usize > i)
                .map(move |&j| (i, j as usize))
        })
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count());
        for (i, j) in self.edges() {
            uf.union(i, j);
        }
        uf.components()
    }
}

/// {i, j} whenever i → j or j → i.
pub fn enhance(g: &DiGraph) -> UndirectedGraph {
    UndirectedGraph::from_edges(g.vertex_count(), g.edges())
}

/// One synchronous round with the original radii: each vertex adopts the
/// largest radius among itself and every vertex whose ball contains it.
pub fn broadcast_radii(g: &DiGraph) -> Vec<f64> {
    let mut out = g.radii.clone();
    for (i, j) in g.edges() {
        out[j] = out[j].max(g.radii[i]);
    }
    out
}

pub fn broadcast_enhance(points: &PointSet, radii: &RadiusAssignment, norm: &NormSpec) -> Result<RadiusAssignment> {
    let g = build_digraph(points, &radii.radii, norm)?;
    Ok(RadiusAssignment {
        radii: broadcast_radii(&g),
        mode: radii.mode,
        n: radii.n,
        broadcast: true,
    })
}

/// One connected component; empty and single-vertex graphs count as connected.
pub fn is_connected(g: &UndirectedGraph) -> bool {
    g.vertex_count() <= 1 || g.component_count() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Marginal;
    use crate::sampling::{rng_from_seed, sample_iid, sample_process, SampleSpec};
    use approx::assert_relative_eq;

    fn linf2() -> NormSpec {
        NormSpec::new(Norm::LInf, 2).unwrap()
    }

    #[test]
    fn two_point_edge_rule() {
        let pts = PointSet::new(2, vec![0.0, 0.0, 0.5, 0.2]).unwrap();
        let g = build_digraph(&pts, &[0.6, 0.3], &linf2()).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let u = enhance(&g);
        assert_eq!(u.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(broadcast_radii(&g), vec![0.6, 0.6]);
    }

    #[test]
    fn closed_ball_includes_boundary() {
        let pts = PointSet::new(1, vec![0.0, 0.25]).unwrap();
        let norm = NormSpec::new(Norm::LInf, 1).unwrap();
        let g = build_digraph(&pts, &[0.25, 0.1], &norm).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn single_vertex_has_no_edges() {
        let pts = PointSet::new(2, vec![0.3, 0.3]).unwrap();
        let g = build_digraph(&pts, &[1.0], &linf2()).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(is_connected(&enhance(&g)));
    }

    #[test]
    fn grid_matches_brute_force_with_mixed_radii() {
        let u = Density::uniform_cube(2).unwrap();
        let mut rng = rng_from_seed(8);
        let pts = sample_iid(&u, 700, &mut rng).unwrap();
        let radii: Vec<f64> = (0..pts.len())
            .map(|i| 0.01 + 0.08 * ((i * 7919) % 101) as f64 / 100.0)
            .collect();
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let spec = NormSpec::new(norm, 2).unwrap();
            let a = build_digraph(&pts, &radii, &spec).unwrap();
            let b = build_digraph_brute_force(&pts, &radii, &spec).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn symmetric_digraph_is_unchanged_by_enhancement() {
        let pts = PointSet::new(2, vec![0.1, 0.1, 0.2, 0.1, 0.9, 0.9]).unwrap();
        let g = build_digraph(&pts, &[0.15; 3], &linf2()).unwrap();
        let u = enhance(&g);
        assert_eq!(u.edge_count() * 2, g.edge_count());
    }

    #[test]
    fn connectivity_examples() {
        let path = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]);
        assert!(is_connected(&path));
        let cliques = UndirectedGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert!(!is_connected(&cliques));
        assert!(is_connected(&UndirectedGraph::from_edges(0, [])));
    }

    #[test]
    fn connectivity_constant_values() {
        assert_eq!(connectivity_constant(1), 1.0);
        assert_eq!(connectivity_constant(2), 1.0);
        assert_relative_eq!(connectivity_constant(3), 4.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn uniform_interior_connectivity_radius_is_half_side() {
        let u = Density::uniform_cube(2).unwrap();
        let pts = PointSet::new(2, vec![0.5, 0.5, 0.001, 0.5]).unwrap();
        let a = connectivity_radii(&pts, &u, &linf2(), 0.2, 1e4).unwrap();
        let m_n = connectivity_half_side(2, 0.2, 1e4);
        assert_relative_eq!(m_n * m_n * 4.0, 1.2 * 1e4f64.ln() / 1e4, max_relative = 1e-12);
        assert_relative_eq!(a.radii[0], m_n, max_relative = 1e-12);
        // Clipped at the boundary, the covering condition is the same.
        assert_relative_eq!(a.radii[1], m_n, max_relative = 1e-12);
    }

    #[test]
    fn connectivity_radii_cover_cube_in_h_space() {
        let d = Density::product(vec![
            Marginal::Power { k: 1.0 },
            Marginal::TruncatedExponential { rate: 2.0 },
        ])
        .unwrap();
        let pts = sample_iid(&d, 300, &mut rng_from_seed(4)).unwrap();
        let a = connectivity_radii(&pts, &d, &linf2(), 0.3, 1e3).unwrap();
        let m_n = connectivity_half_side(2, 0.3, 1e3);
        let ms = d.marginals().unwrap();
        for (x, r) in pts.iter().zip(&a.radii) {
            for (k, m) in ms.iter().enumerate() {
                let u = m.cdf(x[k]);
                assert!(m.cdf(x[k] - r) <= (u - m_n).max(0.0) + 1e-12);
                assert!(m.cdf(x[k] + r) >= (u + m_n).min(1.0) - 1e-12);
            }
        }
    }

    #[test]
    fn connectivity_radii_reject_unsupported_inputs() {
        let u = Density::uniform_cube(2).unwrap();
        let pts = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        let l2 = NormSpec::new(Norm::L2, 2).unwrap();
        assert!(matches!(
            connectivity_radii(&pts, &u, &l2, 0.2, 1e3),
            Err(Error::UnsupportedNorm { .. })
        ));
        let ci = Density::radial_interior(2, 1, Norm::LInf).unwrap();
        assert!(matches!(
            connectivity_radii(&pts, &ci, &linf2(), 0.2, 1e3),
            Err(Error::NotProductDensity)
        ));
    }

    #[test]
    fn fixed_beta_zero_equals_fixed_c_one() {
        let u = Density::uniform_cube(2).unwrap();
        let s = sample_process(&u, SampleSpec::new(300.0, 5)).unwrap();
        let tol = Tolerances::default();
        let a = assign_radii(&s, &u, &linf2(), RadiusMode::FixedC { c: 1.0 }, &tol).unwrap();
        let b = assign_radii(&s, &u, &linf2(), RadiusMode::FixedBeta { beta: 0.0 }, &tol).unwrap();
        assert_eq!(a.radii, b.radii);
    }

    #[test]
    fn broadcast_contains_enhanced_edges() {
        let u = Density::uniform_cube(2).unwrap();
        let s = sample_process(&u, SampleSpec::new(400.0, 6)).unwrap();
        let tol = Tolerances::default();
        let a = assign_radii(&s, &u, &linf2(), RadiusMode::FixedC { c: 0.7 }, &tol).unwrap();
        let g = build_digraph(&s.points, &a.radii, &linf2()).unwrap();
        let b = broadcast_enhance(&s.points, &a, &linf2()).unwrap();
        let gb = build_digraph(&s.points, &b.radii, &linf2()).unwrap();
        let edges: std::collections::HashSet<(usize, usize)> = gb.edges().collect();
        for (i, j) in enhance(&g).edges() {
            assert!(edges.contains(&(i, j)) && edges.contains(&(j, i)));
        }
    }
}
