//! Uniform grid over a point set for fixed-radius and nearest-neighbour queries.

use crate::norm::NormSpec;
use crate::sampling::PointSet;

/// Cells are stored in compressed form: `starts[c]..starts[c + 1]` indexes
/// `items`, which holds the vertex indices of cell `c`.
#[derive(Debug, Clone)]
pub struct GridIndex {
    dim: usize,
    lo: Vec<f64>,
    cell: f64,
    shape: Vec<usize>,
    strides: Vec<usize>,
    starts: Vec<u32>,
    items: Vec<u32>,
}

/// The grid never allocates more than this many cells per point (plus a constant).
const CELLS_PER_POINT: usize = 4;
const MIN_CELL_BUDGET: usize = 1 << 12;

impl GridIndex {
    /// Index with cells of side at least `cell` (enlarged when the cell count would be excessive).
    pub fn new(points: &PointSet, cell: f64) -> Self {
        let dim = points.dim();
        let count = points.len();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points.iter() {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if count == 0 {
            lo = vec![0.0; dim];
            hi = vec![0.0; dim];
        }
        let extent: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
        let budget = (CELLS_PER_POINT * count).max(MIN_CELL_BUDGET) as f64;
        let max_extent = extent.iter().cloned().fold(0.0, f64::max);
        let mut side = if cell.is_finite() && cell > 0.0 {
            cell
        } else {
            max_extent.max(1.0)
        };
        if max_extent == 0.0 {
            side = side.max(1.0);
        }
        loop {
            let cells: f64 = extent.iter().map(|e| (e / side).floor() + 1.0).product();
            if cells <= budget {
                break;
            }
            side *= 1.5;
        }
        let shape: Vec<usize> = extent.iter().map(|e| (e / side).floor() as usize + 1).collect();
        let mut strides = vec![1usize; dim];
        for k in 1..dim {
            strides[k] = strides[k - 1] * shape[k - 1];
        }
        let total: usize = shape.iter().product();

        let mut grid = Self {
            dim,
            lo,
            cell: side,
            shape,
            strides,
            starts: vec![0; total + 1],
            items: vec![0; count],
        };
        let cell_of: Vec<usize> = points.iter().map(|p| grid.cell_index(p)).collect();
        for &c in &cell_of {
            grid.starts[c + 1] += 1;
        }
        for c in 0..total {
            grid.starts[c + 1] += grid.starts[c];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in cell_of.iter().enumerate() {
            grid.items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        grid
    }

    pub fn cell_side(&self) -> f64 {
        self.cell
    }

    fn coord(&self, x: f64, k: usize) -> isize {
        ((x - self.lo[k]) / self.cell).floor() as isize
    }

    fn cell_index(&self, x: &[f64]) -> usize {
        (0..self.dim)
            .map(|k| (self.coord(x[k], k).clamp(0, self.shape[k] as isize - 1) as usize) * self.strides[k])
            .sum()
    }

    fn bucket(&self, cell: usize) -> &[u32] {
        &self.items[self.starts[cell] as usize..self.starts[cell + 1] as usize]
    }

    /// Calls `visit` with every point index in cells whose coordinate ranges
    /// are [from_k, to_k] (inclusive, already clamped).
    fn for_cells(&self, from: &[isize], to: &[isize], mut visit: impl FnMut(usize)) {
        if from.iter().zip(to).any(|(a, b)| a > b) {
            return;
        }
        let mut idx: Vec<isize> = from.to_vec();
        loop {
            let cell: usize = idx.iter().zip(&self.strides).map(|(i, s)| *i as usize * s).sum();
            for &j in self.bucket(cell) {
                visit(j as usize);
            }
            let mut k = 0;
            loop {
                if k == self.dim {
                    return;
                }
                if idx[k] < to[k] {
                    idx[k] += 1;
                    break;
                }
                idx[k] = from[k];
                k += 1;
            }
        }
    }

    /// Every index whose point may lie within ℓ_∞ distance `rho` of `x`
    /// (a superset of the ball for any ℓ_p, since ℓ_p ≥ ℓ_∞).
    pub fn candidates(&self, x: &[f64], rho: f64, visit: impl FnMut(usize)) {
        let mut from = vec![0isize; self.dim];
        let mut to = vec![0isize; self.dim];
        for k in 0..self.dim {
            let last = self.shape[k] as isize - 1;
            // Pad against rounding in x ± rho.
            let reach = rho + (rho + x[k].abs()) * 1e-12;
            let a = self.coord(x[k] - reach, k);
            from[k] = if a > last { last + 1 } else { a.max(0) };
            to[k] = self.coord(x[k] + reach, k).clamp(-1, last);
        }
        self.for_cells(&from, &to, visit);
    }

    /// Indices j with ‖points[j] − x‖ ≤ rho, in increasing order of j.
    pub fn within(&self, points: &PointSet, norm: &NormSpec, x: &[f64], rho: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.candidates(x, rho, |j| {
            if norm.distance(points.point(j), x) <= rho {
                out.push(j);
            }
        });
        out.sort_unstable();
        out
    }

    /// Nearest other point to `points[i]`: (index, distance). Searches rings
    /// of cells outward and stops once the best distance is no larger than
    /// the ℓ_∞ gap to the next ring.
    pub fn nearest(&self, points: &PointSet, norm: &NormSpec, i: usize) -> Option<(usize, f64)> {
        if points.len() < 2 {
            return None;
        }
        let x = points.point(i);
        let centre: Vec<isize> = (0..self.dim)
            .map(|k| self.coord(x[k], k).clamp(0, self.shape[k] as isize - 1))
            .collect();
        let max_ring = self.shape.iter().map(|s| *s as isize).max().unwrap_or(1);
        let mut best: Option<(usize, f64)> = None;
        let mut from = vec![0isize; self.dim];
        let mut to = vec![0isize; self.dim];
        for ring in 0..=max_ring {
            // Cells at Chebyshev cell distance exactly `ring`: visit the
            // (2 ring + 1)^d block and skip the interior.
            for k in 0..self.dim {
                from[k] = (centre[k] - ring).max(0);
                to[k] = (centre[k] + ring).min(self.shape[k] as isize - 1);
            }
            let mut idx = from.clone();
            'cells: loop {
                let on_shell = idx.iter().zip(&centre).any(|(a, c)| (a - c).abs() == ring);
                if on_shell {
                    let cell: usize = idx.iter().zip(&self.strides).map(|(a, s)| *a as usize * s).sum();
                    for &j in self.bucket(cell) {
                        let j = j as usize;
                        if j == i {
                            continue;
                        }
                        let dist = norm.distance(points.point(j), x);
                        if best.is_none_or(|(bj, bd)| dist < bd || (dist == bd && j < bj)) {
                            best = Some((j, dist));
                        }
                    }
                }
                let mut k = 0;
                loop {
                    if k == self.dim {
                        break 'cells;
                    }
                    if idx[k] < to[k] {
                        idx[k] += 1;
                        break;
                    }
                    idx[k] = from[k];
                    k += 1;
                }
            }
            if let Some((_, bd)) = best {
                // Points beyond this ring are more than ring · cell away in ℓ_∞.
                if bd <= ring as f64 * self.cell {
                    break;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Density;
    use crate::norm::Norm;
    use crate::sampling::{rng_from_seed, sample_iid};

    #[test]
    fn every_point_in_one_bucket() {
        let u = Density::uniform_cube(3).unwrap();
        let pts = sample_iid(&u, 500, &mut rng_from_seed(1)).unwrap();
        let grid = GridIndex::new(&pts, 0.07);
        let mut seen = vec![0; pts.len()];
        for &j in &grid.items {
            seen[j as usize] += 1;
        }
        assert!(seen.iter().all(|c| *c == 1));
    }

    #[test]
    fn nearest_matches_brute_force() {
        let u = Density::uniform_cube(2).unwrap();
        let pts = sample_iid(&u, 800, &mut rng_from_seed(2)).unwrap();
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let spec = NormSpec::new(norm, 2).unwrap();
            for cell in [0.01, 0.05, 0.3] {
                let grid = GridIndex::new(&pts, cell);
                for i in (0..pts.len()).step_by(37) {
                    let (_, d) = grid.nearest(&pts, &spec, i).unwrap();
                    let brute = (0..pts.len())
                        .filter(|&j| j != i)
                        .map(|j| spec.distance(pts.point(i), pts.point(j)))
                        .fold(f64::INFINITY, f64::min);
                    assert_eq!(d, brute);
                }
            }
        }
    }

    #[test]
    fn within_matches_brute_force() {
        let u = Density::uniform_cube(2).unwrap();
        let pts = sample_iid(&u, 400, &mut rng_from_seed(3)).unwrap();
        let spec = NormSpec::new(Norm::L2, 2).unwrap();
        let grid = GridIndex::new(&pts, 0.05);
        for rho in [0.0, 0.02, 0.13, 2.0] {
            let x = [0.4, 0.9];
            let brute: Vec<usize> = (0..pts.len())
                .filter(|&j| spec.distance(pts.point(j), &x) <= rho)
                .collect();
            assert_eq!(grid.within(&pts, &spec, &x, rho), brute);
        }
    }

    #[test]
    fn single_point_has_no_neighbour() {
        let pts = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        let grid = GridIndex::new(&pts, 0.1);
        let spec = NormSpec::new(Norm::L2, 2).unwrap();
        assert!(grid.nearest(&pts, &spec, 0).is_none());
    }
}
