//! Small statistics helpers shared by samplers and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// Result of a Pearson chi-square goodness-of-fit test.
#[derive(Clone, Debug)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of observed counts against expected probabilities.
///
/// Buckets with expected count below 5 are merged left-to-right with their
/// successors (standard practice for the chi-square approximation); a
/// trailing underfull bucket is merged into the last kept one.
pub fn chi_square_gof(observed: &[u64], expected_probs: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != expected_probs.len() {
        return Err(Error::DimensionMismatch(format!(
            "observed {} buckets, expected {}",
            observed.len(),
            expected_probs.len()
        )));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter("no observations".into()));
    }
    let sum_p: f64 = expected_probs.iter().sum();
    if (sum_p - 1.0).abs() > 1e-9 || expected_probs.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidParameter(
            "expected probabilities must be a distribution".into(),
        ));
    }

    let mut merged: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        acc_obs += o as f64;
        acc_exp += p * total as f64;
        if acc_exp >= 5.0 {
            merged.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 || acc_obs > 0.0 {
        if let Some(last) = merged.last_mut() {
            last.0 += acc_obs;
            last.1 += acc_exp;
        } else {
            merged.push((acc_obs, acc_exp));
        }
    }
    if merged.len() < 2 {
        return Err(Error::InvalidParameter(
            "not enough buckets with adequate expected counts".into(),
        ));
    }

    let statistic: f64 = merged
        .iter()
        .map(|&(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = merged.len() - 1;
    let dist = ChiSquared::new(dof as f64)
        .map_err(|e| Error::InvalidParameter(format!("chi-square dof: {e}")))?;
    let p_value = 1.0 - dist.cdf(statistic);
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}

/// Exact binomial tail Pr[Bin(n, 1/2) <= t], used to calibrate the Hidden
/// Matching communication protocol threshold.
pub fn binomial_half_cdf(n: usize, t: usize) -> f64 {
    let mut sum = 0.0f64;
    let mut choose = 1.0f64; // C(n, 0)
    for d in 0..=t.min(n) {
        if d > 0 {
            choose *= (n - d + 1) as f64 / d as f64;
        }
        sum += choose;
    }
    sum / 2f64.powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_sampler_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0u64; 8];
        for _ in 0..80_000 {
            counts[rng.gen_range(0..8)] += 1;
        }
        let probs = [1.0 / 8.0; 8];
        let t = chi_square_gof(&counts, &probs).unwrap();
        assert!(t.p_value > 0.001, "p = {}", t.p_value);
    }

    #[test]
    fn biased_sampler_fails() {
        let counts = [30_000u64, 10_000, 10_000, 10_000];
        let probs = [0.25; 4];
        let t = chi_square_gof(&counts, &probs).unwrap();
        assert!(t.p_value < 1e-6);
    }

    #[test]
    fn binomial_tail_values() {
        assert!((binomial_half_cdf(4, 4) - 1.0).abs() < 1e-12);
        assert!((binomial_half_cdf(4, 0) - 1.0 / 16.0).abs() < 1e-12);
        assert!((binomial_half_cdf(4, 2) - 11.0 / 16.0).abs() < 1e-12);
    }
}
