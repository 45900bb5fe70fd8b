//! Small statistics helpers for the Monte Carlo estimators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// A proportion estimate with a Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

impl Proportion {
    pub fn covers(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    /// Binomial standard error of the estimate.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

/// Two-sided standard normal quantile for the given confidence level.
pub fn z_for(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + confidence / 2.0)
}

pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Proportion {
    assert!(successes <= trials, "more successes than trials");
    if trials == 0 {
        return Proportion { successes, trials, estimate: 0.0, ci_low: 0.0, ci_high: 1.0, confidence };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = z_for(confidence);
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Proportion {
        successes,
        trials,
        estimate: p,
        ci_low: (centre - half).max(0.0),
        ci_high: (centre + half).min(1.0),
        confidence,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Pearson test of `observed` against the given expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), expected.len(), "observed/expected length mismatch");
    assert!(observed.len() >= 2, "need at least two cells");
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = observed.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquare { statistic, dof, p_value: 1.0 - dist.cdf(statistic) }
}

/// Pearson test of `observed` against the uniform distribution on its cells.
pub fn chi_square_uniform(observed: &[u64]) -> ChiSquare {
    let total: u64 = observed.iter().sum();
    let e = total as f64 / observed.len() as f64;
    chi_square(observed, &vec![e; observed.len()])
}

const MC_CHUNK: u64 = 2048;

/// Runs `trials` Bernoulli trials in parallel and counts successes. Trials
/// are split into fixed chunks, chunk `i` drawing from stream `i` of a
/// ChaCha8 generator seeded by `seed`, so the count does not depend on the
/// number of threads.
pub fn parallel_successes<E, F>(trials: u64, seed: u64, trial: F) -> Result<u64, E>
where
    E: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<bool, E> + Sync,
{
    let chunks = trials.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let len = MC_CHUNK.min(trials - i * MC_CHUNK);
            let mut hit = 0;
            for _ in 0..len {
                if trial(&mut rng)? {
                    hit += 1;
                }
            }
            Ok(hit)
        })
        .collect::<Result<Vec<u64>, E>>()
        .map(|v| v.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_values() {
        assert!((z_for(0.95) - 1.959964).abs() < 1e-5);
        assert!((z_for(0.99) - 2.575829).abs() < 1e-5);
    }

    #[test]
    fn wilson_known_value() {
        let w = wilson(50, 100, 0.95);
        assert!((w.ci_low - 0.4038).abs() < 1e-3);
        assert!((w.ci_high - 0.5962).abs() < 1e-3);
        let all = wilson(10, 10, 0.99);
        assert_eq!(all.ci_high, 1.0);
        assert!(all.ci_low < 1.0);
    }

    #[test]
    fn chi_square_flat_counts() {
        let c = chi_square_uniform(&[100, 100, 100, 100]);
        assert_eq!(c.statistic, 0.0);
        assert!((c.p_value - 1.0).abs() < 1e-12);
        let skew = chi_square_uniform(&[400, 0, 0, 0]);
        assert!(skew.p_value < 1e-10);
    }
}
