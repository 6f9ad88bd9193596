//! Radially symmetric densities on the unit ball that vanish polynomially,
//! either toward the outer edge or inside an inner hole.
//!
//! For the Euclidean norm the ball mass F(B(x, r)) reduces to a
//! one-dimensional integral over spheres centred at the origin, weighted by
//! the fraction of each sphere that falls inside B(x, r). The integral is
//! taken in the angle variable ρ = c − h·cos θ, which removes the square-root
//! behaviour of the sphere fraction at both ends of its support.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::numeric::gl24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum RadialProfile {
    /// A(1 − ‖x‖)^p on the unit ball.
    Interior { p: u32 },
    /// 0 on B(0, inner), A(‖x‖ − inner)^p on the rest of the unit ball.
    Edge { inner: f64, p: u32 },
}

/// Largest exponent for which the expanded antiderivative is used; beyond
/// this the alternating coefficients lose too many digits.
const MAX_EXPANDED_EXPONENT: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    profile: RadialProfile,
    norm: Norm,
    dim: usize,
    amplitude: f64,
    /// d·θ_d, the surface factor of the norm's spheres.
    shell: f64,
    /// Antiderivative coefficients of g(ρ)ρ^{d-1} in ρ (interior) or ρ − inner (edge).
    antideriv: Vec<f64>,
    /// ∫_0^1 g(ρ) ρ^{d-1} dρ.
    profile_integral: f64,
}

impl RadialDensity {
    pub fn new(profile: RadialProfile, norm: Norm, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let p = match profile {
            RadialProfile::Interior { p } => p,
            RadialProfile::Edge { inner, p } => {
                if !(inner > 0.0 && inner < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "edge-vanishing inner radius must lie in (0, 1), got {inner}"
                    )));
                }
                p
            }
        };
        if p > 40 {
            return Err(Error::InvalidParameter(format!("exponent {p} too large (max 40)")));
        }
        let antideriv = antiderivative_coefficients(profile, dim);
        let mut density = Self {
            profile,
            norm,
            dim,
            amplitude: 1.0,
            shell: dim as f64 * norm.unit_ball_volume(dim),
            antideriv,
            profile_integral: 1.0,
        };
        density.profile_integral = density.profile_moment(1.0);
        density.amplitude = 1.0 / (density.shell * density.profile_integral);
        Ok(density)
    }

    pub fn profile(&self) -> RadialProfile {
        self.profile
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The normalizing constant A.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Inner edge of the support in the radial variable.
    pub fn inner_radius(&self) -> f64 {
        match self.profile {
            RadialProfile::Interior { .. } => 0.0,
            RadialProfile::Edge { inner, .. } => inner,
        }
    }

    /// Unnormalized radial profile g(ρ).
    #[inline]
    pub fn profile_value(&self, rho: f64) -> f64 {
        match self.profile {
            RadialProfile::Interior { p } => {
                if rho <= 1.0 {
                    (1.0 - rho).powi(p as i32)
                } else {
                    0.0
                }
            }
            RadialProfile::Edge { inner, p } => {
                if rho >= inner && rho <= 1.0 {
                    (rho - inner).powi(p as i32)
                } else {
                    0.0
                }
            }
        }
    }

    #[inline]
    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.amplitude * self.profile_value(self.norm.length(x))
    }

    pub fn f_max(&self) -> f64 {
        match self.profile {
            RadialProfile::Interior { .. } => self.amplitude,
            RadialProfile::Edge { inner, p } => self.amplitude * (1.0 - inner).powi(p as i32),
        }
    }

    /// ∫_0^s g(ρ) ρ^{d-1} dρ.
    pub fn profile_moment(&self, s: f64) -> f64 {
        let s = s.min(1.0);
        let (var, p) = match self.profile {
            RadialProfile::Interior { p } => (s, p),
            RadialProfile::Edge { inner, p } => (s - inner, p),
        };
        if var <= 0.0 {
            return 0.0;
        }
        if p <= MAX_EXPANDED_EXPONENT {
            self.antideriv.iter().rev().fold(0.0, |acc, c| acc * var + c)
        } else {
            let lo = self.inner_radius();
            let d = self.dim as i32;
            gl24().integrate_composite(lo, s, 2, |rho| self.profile_value(rho) * rho.powi(d - 1))
        }
    }

    /// Probability mass of {‖X‖ ≤ s}.
    pub fn radial_cdf(&self, s: f64) -> f64 {
        if s >= 1.0 {
            return 1.0;
        }
        (self.profile_moment(s) / self.profile_integral).clamp(0.0, 1.0)
    }

    /// Inverse of [`radial_cdf`](Self::radial_cdf) by safeguarded Newton.
    pub fn radial_quantile(&self, u: f64) -> f64 {
        let lo0 = self.inner_radius();
        if u <= 0.0 {
            return lo0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let d = self.dim as i32;
        let (mut lo, mut hi) = (lo0, 1.0);
        let mut s = lo0 + (1.0 - lo0) * u.powf(1.0 / self.dim as f64);
        for _ in 0..100 {
            let g = self.radial_cdf(s) - u;
            if g.abs() < 1e-14 {
                break;
            }
            if g > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let slope = self.profile_value(s) * s.powi(d - 1) / self.profile_integral;
            let newton = s - g / slope;
            s = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 {
                break;
            }
        }
        s
    }

    /// Mass of a ball centred at the origin, valid for any norm matching the density's.
    pub fn centered_ball_measure(&self, r: f64) -> f64 {
        self.radial_cdf(r)
    }

    /// F(B(x, r)) for the Euclidean norm.
    pub fn ball_measure_l2(&self, x: &[f64], r: f64) -> f64 {
        debug_assert_eq!(self.norm, Norm::L2);
        if r <= 0.0 {
            return 0.0;
        }
        if self.dim == 1 {
            return self.interval_measure_1d(x[0] - r, x[0] + r);
        }
        let s = self.norm.length(x);
        if s == 0.0 {
            return self.radial_cdf(r);
        }
        let a_full = self.amplitude * self.shell;
        let mut mass = 0.0;
        if r > s {
            mass += a_full * self.profile_moment(r - s);
        }
        let rho_lo = (s - r).abs().max(self.inner_radius());
        let rho_hi = (s + r).min(1.0);
        if rho_lo < rho_hi {
            let centre = s.max(r);
            let half = s.min(r);
            let theta_of = |rho: f64| (((centre - rho) / half).clamp(-1.0, 1.0)).acos();
            let (t0, t1) = (theta_of(rho_lo), theta_of(rho_hi));
            let d = self.dim as i32;
            let partial = gl24().integrate_composite(t0, t1, 2, |theta| {
                let rho = centre - half * theta.cos();
                let frac = sphere_fraction(self.dim, rho, s, r);
                self.profile_value(rho) * rho.powi(d - 1) * frac * half * theta.sin()
            });
            mass += a_full * partial;
        }
        mass.clamp(0.0, 1.0)
    }

    fn interval_measure_1d(&self, a: f64, b: f64) -> f64 {
        // f(t) = A g(|t|) on [-1, 1]; integrate piecewise between profile breakpoints.
        let inner = self.inner_radius();
        let mut cuts = vec![-1.0, -inner, 0.0, inner, 1.0, a, b];
        cuts.retain(|c| *c >= a && *c <= b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut mass = 0.0;
        for w in cuts.windows(2) {
            mass += gl24().integrate(w[0], w[1], |t| self.amplitude * self.profile_value(t.abs()));
        }
        mass.clamp(0.0, 1.0)
    }

    /// F(B(x, rx) ∩ B(y, ry)) in two dimensions with the Euclidean norm.
    pub fn lens_measure_l2_2d(&self, x: &[f64], rx: f64, y: &[f64], ry: f64) -> f64 {
        debug_assert!(self.dim == 2 && self.norm == Norm::L2);
        if rx <= 0.0 || ry <= 0.0 {
            return 0.0;
        }
        let arc_x = Disc::new(x, rx);
        let arc_y = Disc::new(y, ry);
        let lo = self.inner_radius();
        let hi = 1f64.min(arc_x.s + arc_x.r).min(arc_y.s + arc_y.r);
        if hi <= lo {
            return 0.0;
        }
        let mut cuts = vec![lo, hi, (arc_x.s - arc_x.r).abs(), (arc_y.s - arc_y.r).abs()];
        cuts.retain(|c| *c >= lo && *c <= hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut mass = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a <= 0.0 {
                continue;
            }
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            mass += gl24().integrate_composite(0.0, PI, 4, |theta| {
                let rho = mid - half * theta.cos();
                let overlap = arc_overlap(arc_x.arc(rho), arc_y.arc(rho));
                self.profile_value(rho) * rho * overlap * half * theta.sin()
            });
        }
        (self.amplitude * mass).max(0.0)
    }
}

/// Fraction of the origin-centred sphere of radius ρ inside B(x, r), ‖x‖ = s > 0.
#[inline]
fn sphere_fraction(dim: usize, rho: f64, s: f64, r: f64) -> f64 {
    if rho <= r - s {
        return 1.0;
    }
    if rho >= s + r || rho <= s - r {
        return 0.0;
    }
    let cos_phi = ((rho * rho + s * s - r * r) / (2.0 * rho * s)).clamp(-1.0, 1.0);
    match dim {
        2 => cos_phi.acos() / PI,
        3 => 0.5 * (1.0 - cos_phi),
        _ => {
            let sin2 = (1.0 - cos_phi * cos_phi).max(0.0);
            let half_cap = 0.5 * statrs::function::beta::beta_reg((dim as f64 - 1.0) / 2.0, 0.5, sin2);
            if cos_phi >= 0.0 {
                half_cap
            } else {
                1.0 - half_cap
            }
        }
    }
}

fn antiderivative_coefficients(profile: RadialProfile, dim: usize) -> Vec<f64> {
    let d = dim as u32;
    match profile {
        RadialProfile::Interior { p } => {
            // (1-ρ)^p ρ^{d-1} = Σ_j C(p,j)(-1)^j ρ^{j+d-1}
            let mut c = vec![0.0; (p + d + 1) as usize];
            for j in 0..=p {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                c[(j + d) as usize] = sign * binomial(p, j) / (j + d) as f64;
            }
            c
        }
        RadialProfile::Edge { inner, p } => {
            // u^p (u+inner)^{d-1} = Σ_k C(d-1,k) inner^{d-1-k} u^{p+k}
            let mut c = vec![0.0; (p + d + 1) as usize];
            for k in 0..d {
                c[(p + k + 1) as usize] = binomial(d - 1, k) * inner.powi((d - 1 - k) as i32) / (p + k + 1) as f64;
            }
            c
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A Euclidean disc seen from the origin: distance s, polar angle α, radius r.
struct Disc {
    s: f64,
    alpha: f64,
    r: f64,
}

enum Arc {
    Empty,
    Full,
    Span(f64, f64),
}

impl Disc {
    fn new(c: &[f64], r: f64) -> Self {
        Self {
            s: (c[0] * c[0] + c[1] * c[1]).sqrt(),
            alpha: c[1].atan2(c[0]),
            r,
        }
    }

    fn arc(&self, rho: f64) -> Arc {
        if rho <= self.r - self.s {
            return Arc::Full;
        }
        if rho >= self.s + self.r || rho <= self.s - self.r {
            return Arc::Empty;
        }
        let cos_phi = ((rho * rho + self.s * self.s - self.r * self.r) / (2.0 * rho * self.s)).clamp(-1.0, 1.0);
        let phi = cos_phi.acos();
        Arc::Span(self.alpha - phi, self.alpha + phi)
    }
}

fn arc_overlap(a: Arc, b: Arc) -> f64 {
    match (a, b) {
        (Arc::Empty, _) | (_, Arc::Empty) => 0.0,
        (Arc::Full, Arc::Full) => 2.0 * PI,
        (Arc::Full, Arc::Span(lo, hi)) | (Arc::Span(lo, hi), Arc::Full) => hi - lo,
        (Arc::Span(a0, a1), Arc::Span(b0, b1)) => (-1..=1)
            .map(|k| {
                let shift = 2.0 * PI * k as f64;
                (a1.min(b1 + shift) - a0.max(b0 + shift)).max(0.0)
            })
            .sum::<f64>()
            .min(2.0 * PI),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interior(d: usize, p: u32) -> RadialDensity {
        RadialDensity::new(RadialProfile::Interior { p }, Norm::L2, d).unwrap()
    }

    #[test]
    fn interior_normalizer_in_the_plane() {
        // ∫ A(1-ρ) 2πρ dρ = Aπ/3 = 1
        assert_relative_eq!(interior(2, 1).amplitude(), 3.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn edge_normalizer_matches_quadrature() {
        let f = RadialDensity::new(RadialProfile::Edge { inner: 0.4, p: 2 }, Norm::L2, 3).unwrap();
        let total = gl24().integrate_composite(0.4, 1.0, 4, |rho| {
            f.amplitude() * (rho - 0.4).powi(2) * 4.0 * PI * rho * rho
        });
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn centred_ball_matches_antiderivative() {
        // 6∫_0^r (ρ - ρ²) dρ = 3r² - 2r³
        let f = interior(2, 1);
        for k in 1..=20 {
            let r = k as f64 / 20.0;
            let exact = 3.0 * r * r - 2.0 * r.powi(3);
            assert_relative_eq!(f.ball_measure_l2(&[0.0, 0.0], r), exact, epsilon = 1e-12);
        }
        assert_relative_eq!(f.ball_measure_l2(&[0.0, 0.0], 0.5), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn off_centre_ball_matches_brute_force_grid() {
        let f = interior(2, 1);
        let (x, r) = ([0.35, -0.2], 0.3);
        let m = 1200;
        let h = 2.0 * r / m as f64;
        let mut brute = 0.0;
        for i in 0..m {
            for j in 0..m {
                let y = [x[0] - r + (i as f64 + 0.5) * h, x[1] - r + (j as f64 + 0.5) * h];
                if Norm::L2.distance(&x, &y) <= r {
                    brute += f.pdf(&y) * h * h;
                }
            }
        }
        assert_relative_eq!(f.ball_measure_l2(&x, r), brute, max_relative = 2e-4);
    }

    #[test]
    fn ball_covering_support_has_unit_mass() {
        let f = RadialDensity::new(RadialProfile::Edge { inner: 0.5, p: 1 }, Norm::L2, 2).unwrap();
        assert_relative_eq!(f.ball_measure_l2(&[0.3, 0.1], 1.5), 1.0, epsilon = 1e-12);
        let g = interior(3, 2);
        assert_relative_eq!(g.ball_measure_l2(&[0.0, 0.2, 0.1], 1.3), 1.0, epsilon = 1e-12);
        let h = interior(4, 1);
        assert_relative_eq!(h.ball_measure_l2(&[0.1, 0.0, 0.2, 0.0], 1.4), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn one_dimensional_interval_mass() {
        let f = interior(1, 1);
        // A = 1 on [-1, 1] with g = 1 - |t|
        assert_relative_eq!(f.amplitude(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(f.ball_measure_l2(&[0.0], 1.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(f.ball_measure_l2(&[0.5], 0.5), 0.5, epsilon = 1e-14);
        assert_relative_eq!(f.ball_measure_l2(&[0.5], 0.25), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn radial_quantile_inverts_cdf() {
        for f in [
            interior(2, 1),
            interior(3, 4),
            RadialDensity::new(RadialProfile::Edge { inner: 0.3, p: 2 }, Norm::L1, 2).unwrap(),
        ] {
            for k in 1..50 {
                let u = k as f64 / 50.0;
                assert_relative_eq!(f.radial_cdf(f.radial_quantile(u)), u, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn lens_of_identical_discs_is_ball_mass() {
        let f = interior(2, 1);
        let x = [0.2, 0.3];
        assert_relative_eq!(
            f.lens_measure_l2_2d(&x, 0.15, &x, 0.15),
            f.ball_measure_l2(&x, 0.15),
            max_relative = 1e-6
        );
    }

    #[test]
    fn lens_of_disjoint_discs_is_zero() {
        let f = interior(2, 1);
        assert_eq!(f.lens_measure_l2_2d(&[0.5, 0.0], 0.1, &[-0.5, 0.0], 0.1), 0.0);
    }
}
