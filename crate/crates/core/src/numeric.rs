//! Small numerical kernels: Gauss–Legendre rules, Halton points, predicate bisection.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    #[inline]
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }

    /// Composite rule over `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate_composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * h;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 24-point rule.
pub fn gl24() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(24))
}

/// Shared 12-point rule.
pub fn gl12() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(12))
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    out
}

/// The `index`-th Halton point in `dim` dimensions (`dim <= 16`), skipping index 0.
pub fn halton(index: u64, dim: usize, out: &mut [f64]) {
    assert!(dim <= PRIMES.len(), "Halton sequence supports up to 16 dimensions");
    for (k, o) in out.iter_mut().take(dim).enumerate() {
        *o = radical_inverse(index + 1, PRIMES[k]);
    }
}

/// Fixed Cranley–Patterson shift vector number `k` (deterministic, irrational increments).
pub fn cp_shift(k: usize, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|j| {
            let alpha = (PRIMES[j] as f64).sqrt().fract();
            ((k as f64 + 1.0) * alpha).fract()
        })
        .collect()
}

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, assuming `pred` is monotone
/// (false then true) and `pred(hi)` holds. Stops when the bracket is narrower
/// than `rel_width * hi` or after `max_iter` halvings. Returns the upper end.
pub fn bisect_predicate(
    mut lo: f64,
    mut hi: f64,
    rel_width: f64,
    max_iter: usize,
    mut pred: impl FnMut(f64) -> bool,
) -> f64 {
    for _ in 0..max_iter {
        if hi - lo <= rel_width * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// SplitMix64 finalizer; stable across platforms and releases.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(12);
        // degree 23 is the exactness limit
        let v = rule.integrate(0.0, 1.0, |x| x.powi(23));
        assert_relative_eq!(v, 1.0 / 24.0, max_relative = 1e-13);
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_smooth_integrand() {
        let v = gl24().integrate_composite(0.0, PI, 2, f64::sin);
        assert_relative_eq!(v, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn halton_first_points() {
        let mut p = [0.0; 2];
        halton(0, 2, &mut p);
        assert_eq!(p, [0.5, 1.0 / 3.0]);
        halton(1, 2, &mut p);
        assert_eq!(p, [0.25, 2.0 / 3.0]);
    }

    #[test]
    fn bisect_finds_threshold() {
        let x = bisect_predicate(0.0, 10.0, 1e-14, 200, |x| x * x >= 2.0);
        assert_relative_eq!(x, 2f64.sqrt(), max_relative = 1e-13);
    }
}
