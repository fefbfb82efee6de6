use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use super::BenchError;

/// Expected number of voxels scanned before the first voxel occupied by
/// both the transition (probability `p_mot`) and the proposition
/// (probability `p_pred`), when occupancies are independent.
pub fn predicted_examined(p_mot: f64, p_pred: f64) -> f64 {
    1.0 / (p_mot * p_pred)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliResult {
    pub mean: f64,
    pub std_error: f64,
    pub prediction: f64,
    pub trials: usize,
}

const TRIALS_PER_STREAM: usize = 4096;

/// Monte-Carlo estimate of the voxels examined by an early-exit scan over
/// rows of length `n` with independent Bernoulli occupancy. Each trial
/// draws the row's occupied positions by geometric gaps and samples the
/// proposition bit only at those positions; the count is the position of
/// the first witness plus one, or `n` when there is none.
pub fn bernoulli_experiment(
    p_mot: f64,
    p_pred: f64,
    trials: usize,
    n: u64,
    seed: u64,
) -> Result<BernoulliResult, BenchError> {
    let valid = |p: f64| p > 0.0 && p <= 1.0;
    if !valid(p_mot) || !valid(p_pred) {
        return Err(BenchError::Probability { p_mot, p_pred });
    }
    if trials == 0 || n == 0 {
        return Err(BenchError::Scenario(
            "trials and row length must be positive".into(),
        ));
    }
    let gaps = Geometric::new(p_mot).map_err(|e| BenchError::Scenario(e.to_string()))?;
    let streams = trials.div_ceil(TRIALS_PER_STREAM);
    let (sum, sum_sq) = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let count = TRIALS_PER_STREAM.min(trials - s * TRIALS_PER_STREAM);
            let mut acc = (0.0f64, 0.0f64);
            for _ in 0..count {
                let mut pos = 0u64;
                let examined = loop {
                    pos = pos.saturating_add(gaps.sample(&mut rng));
                    if pos >= n {
                        break n;
                    }
                    if rng.random_bool(p_pred) {
                        break pos + 1;
                    }
                    pos += 1;
                } as f64;
                acc.0 += examined;
                acc.1 += examined * examined;
            }
            acc
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let t = trials as f64;
    let mean = sum / t;
    let var = if trials > 1 {
        (sum_sq - t * mean * mean) / (t - 1.0)
    } else {
        0.0
    };
    Ok(BernoulliResult {
        mean,
        std_error: (var.max(0.0) / t).sqrt(),
        prediction: predicted_examined(p_mot, p_pred),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_occupancy() {
        let r = bernoulli_experiment(1.0, 1.0, 1000, 1 << 21, 1).unwrap();
        assert_eq!(r.mean, 1.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn geometric_mean() {
        let r = bernoulli_experiment(0.1, 0.5, 100_000, 1 << 21, 2).unwrap();
        assert!((r.mean / 20.0 - 1.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn factor_between_occupancies() {
        let hi = predicted_examined(2.23e-4, 0.9);
        let lo = predicted_examined(2.23e-4, 0.01);
        assert!((lo / hi - 90.0).abs() < 1e-9);
        assert!((predicted_examined(0.9, 0.01) - 111.111).abs() < 1e-3);
    }

    #[test]
    fn censoring_at_row_end() {
        let r = bernoulli_experiment(1.0, 1e-9, 10, 50, 3).unwrap();
        assert_eq!(r.mean, 50.0);
    }

    #[test]
    fn invalid_probabilities() {
        assert!(bernoulli_experiment(0.0, 0.5, 10, 10, 0).is_err());
        assert!(bernoulli_experiment(0.5, 1.5, 10, 10, 0).is_err());
    }

    #[test]
    fn deterministic() {
        let a = bernoulli_experiment(0.3, 0.2, 10_000, 1 << 20, 5).unwrap();
        let b = bernoulli_experiment(0.3, 0.2, 10_000, 1 << 20, 5).unwrap();
        assert_eq!(a, b);
    }
}
