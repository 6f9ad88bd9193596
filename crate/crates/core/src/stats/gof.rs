//! Distribution distances and goodness-of-fit tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use crate::error::{Error, Result};

fn poisson(lambda: f64) -> Result<Poisson> {
    Poisson::new(lambda).map_err(|e| Error::InvalidParameter(format!("Poisson mean {lambda}: {e}")))
}

/// counts[k] = number of observations equal to k.
pub fn histogram(values: &[u64]) -> Vec<u64> {
    let max = values.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut out = vec![0u64; max];
    for &v in values {
        out[v as usize] += 1;
    }
    out
}

/// ½ Σ_k |p̂(k) − Po(λ)(k)|, with Po(λ) mass above the largest bin counted as one term.
pub fn tv_distance_to_poisson(counts: &[u64], lambda: f64) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter("empty histogram".into()));
    }
    let po = poisson(lambda)?;
    let mut sum = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        sum += (c as f64 / total as f64 - po.pmf(k as u64)).abs();
    }
    let tail = po.sf(counts.len().saturating_sub(1) as u64);
    sum += tail;
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Left edges of the merged bins; the last bin is open to the right.
    pub bin_starts: Vec<u64>,
}

/// Pearson chi-square fit of observed counts to Poisson(λ) with λ known.
/// Adjacent values are merged until every bin expects at least `min_expected`
/// observations; the last bin is the whole upper tail.
pub fn chi_square_poisson(counts: &[u64], lambda: f64, min_expected: f64) -> Result<ChiSquareFit> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter("empty histogram".into()));
    }
    let po = poisson(lambda)?;
    let r = total as f64;
    let observed_at = |k: u64| counts.get(k as usize).copied().unwrap_or(0) as f64;
    // (start, expected, observed) for closed bins.
    let mut bins: Vec<(u64, f64, f64)> = Vec::new();
    let mut start = 0u64;
    let (mut exp, mut obs) = (0.0, 0.0);
    let mut k = 0u64;
    loop {
        exp += r * po.pmf(k);
        obs += observed_at(k);
        let rest = r * po.sf(k);
        if exp >= min_expected && rest >= min_expected {
            bins.push((start, exp, obs));
            start = k + 1;
            exp = 0.0;
            obs = 0.0;
        } else if rest < min_expected {
            break;
        }
        k += 1;
    }
    // Open upper bin from `start`.
    let tail_obs: f64 = (start..counts.len() as u64).map(observed_at).sum();
    let tail_exp = r * if start == 0 { 1.0 } else { po.sf(start - 1) };
    bins.push((start, tail_exp, tail_obs));
    if let [.., a, b] = bins.as_mut_slice() {
        if b.1 < min_expected {
            a.1 += b.1;
            a.2 += b.2;
            bins.pop();
        }
    }
    if bins.len() < 2 {
        return Err(Error::InvalidParameter(
            "too few observations for a chi-square fit".into(),
        ));
    }
    let statistic: f64 = bins.iter().map(|(_, e, o)| (o - e).powi(2) / e).sum();
    let df = bins.len() - 1;
    let chi = ChiSquared::new(df as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(ChiSquareFit {
        statistic,
        df,
        p_value: chi.sf(statistic),
        bin_starts: bins.iter().map(|b| b.0).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test against Uniform[0, 1] with the
/// asymptotic Kolmogorov distribution (small-sample corrected argument).
pub fn ks_uniform(values: &[f64]) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("no observations".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let statistic = v
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let u = u.clamp(0.0, 1.0);
            ((i as f64 + 1.0) / n - u).max(u - i as f64 / n)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_sf(lambda),
    })
}

/// P(K > λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2 k² λ²).
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn tv_examples() {
        assert_relative_eq!(
            tv_distance_to_poisson(&[10], 1.0).unwrap(),
            1.0 - (-1f64).exp(),
            max_relative = 1e-12
        );
        // Frequencies proportional to the pmf up to k = 30 (tail negligible).
        let po = Poisson::new(2.0).unwrap();
        let counts: Vec<u64> = (0..30).map(|k| (po.pmf(k) * 1e12).round() as u64).collect();
        assert!(tv_distance_to_poisson(&counts, 2.0).unwrap() < 1e-9);
    }

    #[test]
    fn histogram_counts_values() {
        assert_eq!(histogram(&[0, 2, 2, 5]), vec![1, 0, 2, 0, 0, 1]);
        assert!(histogram(&[]).is_empty());
    }

    #[test]
    fn chi_square_accepts_poisson_draws() {
        let mut rng = rng_from_seed(13);
        let dist = rand_distr::Poisson::new(9.2).unwrap();
        let draws: Vec<u64> = (0..2000).map(|_| rng.sample(dist) as u64).collect();
        let fit = chi_square_poisson(&histogram(&draws), 9.2, 5.0).unwrap();
        assert!(fit.p_value > 0.01, "{fit:?}");
        let wrong = chi_square_poisson(&histogram(&draws), 8.0, 5.0).unwrap();
        assert!(wrong.p_value < 0.01);
    }

    #[test]
    fn ks_detects_uniformity() {
        let mut rng = rng_from_seed(14);
        let u: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_uniform(&u).unwrap().p_value > 0.01);
        let skew: Vec<f64> = u.iter().map(|v| v * v).collect();
        assert!(ks_uniform(&skew).unwrap().p_value < 1e-6);
    }

    #[test]
    fn kolmogorov_reference_value() {
        // P(K > 1.36) ≈ 0.0494 (the classical 5% critical value).
        assert_relative_eq!(kolmogorov_sf(1.36), 0.0494, max_relative = 1e-2);
    }
}
