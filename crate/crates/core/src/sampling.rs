//! Poisson point processes with intensity n·f.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::density::{Density, DensityKind, RadialDensity};
use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::numeric::splitmix64;

/// Identifier of the generator and seed derivation, recorded in every output.
pub const RNG_ID: &str = "chacha8/splitmix64-seed-v1";

/// Rejection sampling gives up when fewer than this fraction of proposals are accepted.
pub const ACCEPTANCE_FLOOR: f64 = 1e-4;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of replicate `replicate` at intensity index `n_index`.
pub fn replicate_seed(base_seed: u64, n_index: usize, replicate: usize) -> u64 {
    let a = splitmix64(base_seed);
    let b = splitmix64(a ^ (n_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(b ^ (replicate as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// Intensity; the expected number of points.
    pub n: f64,
    pub seed: u64,
    pub max_points: u64,
}

impl SampleSpec {
    /// Spec with the default cap n + 10√n + 100.
    pub fn new(n: f64, seed: u64) -> Self {
        Self {
            n,
            seed,
            max_points: default_cap(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > 1.0 && self.n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "intensity must exceed 1, got {}",
                self.n
            )));
        }
        if (self.max_points as f64) < self.n + 10.0 * self.n.sqrt() {
            return Err(Error::InvalidParameter(format!(
                "point cap {} is below n + 10 sqrt(n)",
                self.max_points
            )));
        }
        Ok(())
    }
}

pub fn default_cap(n: f64) -> u64 {
    (n + 10.0 * n.sqrt() + 100.0).ceil() as u64
}

/// Points stored as one flat coordinate buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn push(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.dim);
        self.coords.extend_from_slice(x);
    }

    /// Writes one row per point with header `x0,...,x{d-1}`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record((0..self.dim).map(|k| format!("x{k}")))?;
        for p in self.iter() {
            w.write_record(p.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let dim = r.headers()?.len();
        let mut coords = Vec::new();
        for record in r.records() {
            for field in record?.iter() {
                coords.push(field.parse::<f64>().map_err(|e| {
                    Error::InvalidParameter(format!("{}: bad coordinate {field:?}: {e}", path.display()))
                })?);
            }
        }
        Self::new(dim, coords)
    }
}

/// One realization of the process.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    pub spec: SampleSpec,
    pub points: PointSet,
}

impl PointSample {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Poisson(n) draw; 0 for n = 0.
pub fn poisson_count<R: Rng + ?Sized>(n: f64, rng: &mut R) -> Result<u64> {
    if n == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(n).map_err(|e| Error::InvalidParameter(format!("Poisson mean {n}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// `count` independent draws from the density.
pub fn sample_iid<R: Rng + ?Sized>(density: &Density, count: usize, rng: &mut R) -> Result<PointSet> {
    let d = density.dim();
    let mut out = PointSet {
        dim: d,
        coords: Vec::with_capacity(count * d),
    };
    let mut x = vec![0.0; d];
    match density.kind() {
        DensityKind::UniformCube => {
            for _ in 0..count {
                for v in x.iter_mut() {
                    *v = rng.random::<f64>();
                }
                out.push(&x);
            }
        }
        DensityKind::Product(ms) => {
            for _ in 0..count {
                for (v, m) in x.iter_mut().zip(ms) {
                    *v = m.inv_cdf(rng.random::<f64>());
                }
                out.push(&x);
            }
        }
        DensityKind::Radial(r) => {
            for _ in 0..count {
                radial_draw(r, rng, &mut x);
                out.push(&x);
            }
        }
        DensityKind::ClassH(_) => {
            let (lo, hi) = density.support_bbox();
            let envelope = density.f_bounds().1;
            let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
            // Expected acceptance is 1 / (envelope · volume).
            let rate = 1.0 / (envelope * volume);
            if rate < ACCEPTANCE_FLOOR {
                return Err(Error::RejectionRate {
                    rate,
                    floor: ACCEPTANCE_FLOOR,
                });
            }
            let mut proposals: u64 = 0;
            let mut accepted: u64 = 0;
            while (accepted as usize) < count {
                proposals += 1;
                for (k, v) in x.iter_mut().enumerate() {
                    *v = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                }
                if rng.random::<f64>() * envelope < density.pdf_unchecked(&x) {
                    out.push(&x);
                    accepted += 1;
                } else if proposals >= 10_000 && (accepted as f64) < ACCEPTANCE_FLOOR * proposals as f64 {
                    return Err(Error::RejectionRate {
                        rate: accepted as f64 / proposals as f64,
                        floor: ACCEPTANCE_FLOOR,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Radius by radial inverse CDF, direction uniform on the unit sphere of the
/// density's norm (surface measure of the norm's cone, so that the pair
/// gives the density A g(‖x‖)).
fn radial_draw<R: Rng + ?Sized>(r: &RadialDensity, rng: &mut R, x: &mut [f64]) {
    let rho = r.radial_quantile(rng.random::<f64>());
    match r.norm() {
        Norm::L2 => {
            for v in x.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
        }
        Norm::L1 => {
            for v in x.iter_mut() {
                let e: f64 = rng.sample(Exp1);
                *v = if rng.random::<bool>() { e } else { -e };
            }
        }
        Norm::LInf => {
            for v in x.iter_mut() {
                *v = 2.0 * rng.random::<f64>() - 1.0;
            }
        }
    }
    let len = r.norm().length(x);
    for v in x.iter_mut() {
        *v *= rho / len;
    }
}

/// N ~ Poisson(n) followed by N i.i.d. points, all driven by `spec.seed`.
pub fn sample_process(density: &Density, spec: SampleSpec) -> Result<PointSample> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let count = poisson_count(spec.n, &mut rng)?;
    if count > spec.max_points {
        return Err(Error::CapExceeded {
            count,
            cap: spec.max_points,
        });
    }
    let points = sample_iid(density, count as usize, &mut rng)?;
    Ok(PointSample { spec, points })
}
