use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DiGraph, UndirectedGraph};
use crate::error::{Error, Result};

/// Edge list with header `src,dst`.
pub fn write_edges_csv(g: &DiGraph, path: &Path) -> Result<()> {
    write_pairs(g.edges(), path)
}

/// Undirected edges as `src,dst` with src < dst.
pub fn write_undirected_edges_csv(g: &UndirectedGraph, path: &Path) -> Result<()> {
    write_pairs(g.edges(), path)
}

fn write_pairs(edges: impl Iterator<Item = (usize, usize)>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["src", "dst"])?;
    for (i, j) in edges {
        w.write_record([i.to_string(), j.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    #[serde(rename = "N")]
    pub vertex_count: usize,
    pub edge_count: usize,
    /// Entry k counts vertices of (out-)degree k.
    pub degree_histogram: Vec<usize>,
}

impl GraphSummary {
    pub fn from_degrees(degrees: &[usize], edge_count: usize) -> Self {
        let max = degrees.iter().copied().max().unwrap_or(0);
        let mut degree_histogram = vec![0; if degrees.is_empty() { 0 } else { max + 1 }];
        for &d in degrees {
            degree_histogram[d] += 1;
        }
        Self {
            vertex_count: degrees.len(),
            edge_count,
            degree_histogram,
        }
    }

    pub fn of_digraph(g: &DiGraph) -> Self {
        Self::from_degrees(&g.out_degrees(), g.edge_count())
    }

    pub fn of_undirected(g: &UndirectedGraph) -> Self {
        Self::from_degrees(&g.degrees(), g.edge_count())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_digraph;
    use crate::norm::{Norm, NormSpec};
    use crate::sampling::PointSet;

    #[test]
    fn edge_csv_and_summary() {
        let pts = PointSet::new(1, vec![0.0, 0.1, 0.5]).unwrap();
        let norm = NormSpec::new(Norm::LInf, 1).unwrap();
        let g = build_digraph(&pts, &[0.2, 0.05, 0.45], &norm).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("edges.csv");
        write_edges_csv(&g, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "src,dst\n0,1\n2,1\n");
        let s = GraphSummary::of_digraph(&g);
        assert_eq!(s.degree_histogram, vec![1, 2]);
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["N"], 3);
        assert_eq!(json["edge_count"], 2);
    }
}
