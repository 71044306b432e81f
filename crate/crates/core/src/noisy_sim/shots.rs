use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::SimError;

/// Sample mean of `shots` single-shot `±1` outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotEstimate {
    pub mean: f64,
    /// Estimated variance of the mean, `(1 - mean^2) / shots`.
    pub variance: f64,
    pub shots: u64,
}

/// Draws `shots` outcomes with `P(+1) = (1 + true_exp) / 2`.
///
/// The number of `+1` outcomes is drawn from the equivalent binomial
/// distribution, so the cost does not grow with the shot count.
pub fn sample_estimate(true_exp: f64, shots: u64, seed: u64) -> Result<ShotEstimate, SimError> {
    if shots == 0 {
        return Err(SimError::InvalidArgument(
            "at least one shot is required".into(),
        ));
    }
    if !true_exp.is_finite() || true_exp.abs() > 1.0 + 1e-9 {
        return Err(SimError::InvalidArgument(format!(
            "expectation {true_exp} outside [-1, 1]"
        )));
    }
    let prob = (0.5 * (1.0 + true_exp)).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ups = Binomial::new(shots, prob)
        .map_err(|e| SimError::InvalidArgument(e.to_string()))?
        .sample(&mut rng);
    let mean = (2.0 * ups as f64 - shots as f64) / shots as f64;
    Ok(ShotEstimate {
        mean,
        variance: (1.0 - mean * mean) / shots as f64,
        shots,
    })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic child seed for a labelled sub-stream.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_outcome_has_no_variance() {
        for seed in 0..5 {
            let e = sample_estimate(1.0, 1000, seed).unwrap();
            assert_eq!((e.mean, e.variance), (1.0, 0.0));
            assert_eq!(sample_estimate(-1.0, 7, seed).unwrap().mean, -1.0);
        }
    }

    #[test]
    fn variance_formula() {
        let e = sample_estimate(0.0, 4, 9).unwrap();
        assert!((e.variance - (1.0 - e.mean * e.mean) / 4.0).abs() < 1e-15);
        assert!([-1.0, -0.5, 0.0, 0.5, 1.0].contains(&e.mean));
    }

    #[test]
    fn concentration_at_large_shot_counts() {
        let bound = 5.0 * (0.75f64 / 5e6).sqrt();
        for seed in 0..20 {
            let e = sample_estimate(0.5, 5_000_000, seed).unwrap();
            assert!((e.mean - 0.5).abs() <= bound);
        }
    }

    #[test]
    fn same_seed_same_result() {
        assert_eq!(
            sample_estimate(0.3, 1000, 42).unwrap(),
            sample_estimate(0.3, 1000, 42).unwrap()
        );
        assert_ne!(derive_seed(1, &[0]), derive_seed(1, &[1]));
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert!(sample_estimate(0.3, 0, 1).is_err());
        assert!(sample_estimate(1.5, 10, 1).is_err());
    }
}
