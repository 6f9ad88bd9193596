//! Per-realization statistics: degree extremes, isolated counts, exact
//! critical levels, the H function, and distribution checks.

mod cutoff;
mod entropy;
mod gof;
mod summary;

use serde::{Deserialize, Serialize};

pub use cutoff::{critical_cutoff, critical_cutoff_enhanced, critical_cutoffs, Cutoff, CutoffResult};
pub use entropy::{degree_bounds, entropy_h, h_inverse, Branch, DegreeBounds, H_INVERSE_RESIDUAL};
pub use gof::{chi_square_poisson, histogram, ks_uniform, tv_distance_to_poisson, ChiSquareFit, KsResult};
pub use summary::{quantile_sorted, Summary};

use crate::graph::{DiGraph, UndirectedGraph};

/// W_n: vertices with no out-neighbour.
pub fn count_zero_outdegree(g: &DiGraph) -> usize {
    (0..g.vertex_count()).filter(|&i| g.out_degree(i) == 0).count()
}

/// W̃_n: vertices of degree zero in the symmetrized graph.
pub fn count_isolated(g: &UndirectedGraph) -> usize {
    (0..g.vertex_count()).filter(|&i| g.degree(i) == 0).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub out_degrees: Vec<usize>,
    /// Δ_n; 0 for an empty graph.
    pub max_out_degree: usize,
    /// δ_n; 0 for an empty graph.
    pub min_out_degree: usize,
    pub mean_out_degree: f64,
    /// W_n.
    pub zero_out_degree: usize,
}

impl DegreeSummary {
    pub fn of(g: &DiGraph) -> Self {
        let out_degrees = g.out_degrees();
        let count = out_degrees.len();
        Self {
            max_out_degree: out_degrees.iter().copied().max().unwrap_or(0),
            min_out_degree: out_degrees.iter().copied().min().unwrap_or(0),
            mean_out_degree: if count == 0 {
                0.0
            } else {
                out_degrees.iter().sum::<usize>() as f64 / count as f64
            },
            zero_out_degree: out_degrees.iter().filter(|d| **d == 0).count(),
            out_degrees,
        }
    }
}
