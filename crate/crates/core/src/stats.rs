//! Small statistics helpers shared by the estimators and tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp so that lo <= phat <= hi survives rounding at the endpoints.
    Interval {
        lo: (centre - half).max(0.0).min(phat),
        hi: (centre + half).min(1.0).max(phat),
    }
}

/// Binomial standard error of a proportion estimate.
pub fn std_error(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    let mut log = -lambda + k as f64 * lambda.ln();
    for i in 2..=k {
        log -= (i as f64).ln();
    }
    log.exp()
}

/// Total-variation distance between an empirical law on `0..counts.len()`
/// and Poisson(`lambda`); the Poisson tail beyond the support counts fully.
pub fn tv_to_poisson(counts: &[u64], lambda: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut dist = 0.0;
    let mut covered = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let q = poisson_pmf(lambda, k as u64);
        covered += q;
        dist += (c as f64 / total as f64 - q).abs();
    }
    dist += (1.0 - covered).max(0.0);
    dist / 2.0
}

/// Pearson statistic of `observed` against equal expected cell counts.
pub fn chi_square_uniform(observed: &[u64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let expected = total as f64 / observed.len() as f64;
    observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Upper critical value of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_critical(dof: u64, significance: f64) -> f64 {
    chi_square_quantile(dof as f64, significance)
}

/// As [`chi_square_critical`], for fractional degrees of freedom.
pub fn chi_square_quantile(dof: f64, significance: f64) -> f64 {
    let law = ChiSquared::new(dof).expect("positive degrees of freedom");
    law.inverse_cdf(1.0 - significance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate_and_stays_in_unit_interval() {
        for &(s, n) in &[(0u64, 10u64), (10, 10), (3, 10), (500, 1000), (1, 100_000)] {
            let iv = wilson(s, n, Z95);
            let p = s as f64 / n as f64;
            assert!(0.0 <= iv.lo && iv.lo <= p && p <= iv.hi && iv.hi <= 1.0);
        }
        let iv = wilson(0, 100, Z95);
        assert_eq!(iv.lo, 0.0);
        assert!(iv.hi > 0.03 && iv.hi < 0.04);
    }

    #[test]
    fn chi_square_quantile_matches_tables() {
        // chi2_{0.99} with 3 degrees of freedom is 11.345
        assert!((chi_square_critical(3, 0.01) - 11.3449).abs() < 1e-3);
        assert!((chi_square_critical(34, 0.01) - 56.0609).abs() < 1e-3);
    }

    #[test]
    fn poisson_half() {
        let total: f64 = (0..30).map(|k| poisson_pmf(0.5, k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((poisson_pmf(0.5, 0) - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tv_of_exact_law_is_small() {
        let counts: Vec<u64> = (0..10).map(|k| (poisson_pmf(0.5, k) * 1e9).round() as u64).collect();
        assert!(tv_to_poisson(&counts, 0.5) < 1e-6);
        assert!((tv_to_poisson(&[1], 0.5) - (1.0 - (-0.5f64).exp())).abs() < 1e-12);
    }
}
