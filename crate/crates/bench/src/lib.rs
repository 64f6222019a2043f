//! Shared fixtures for the benchmarks.

use akfit::experiment::MixtureDensity;
use akfit::{build_empirical, EmpiricalDistribution, Interval, Polynomial, WeightedSequence};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sizes swept by the fit benchmarks.
pub const SIZES: [usize; 3] = [10_000, 40_000, 160_000];

pub fn gmm_samples(n: usize, seed: u64) -> Vec<f64> {
    MixtureDensity::gmm().sample(n, seed)
}

pub fn gmm_empirical(n: usize, seed: u64) -> EmpiricalDistribution {
    let xs = gmm_samples(n, seed);
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    build_empirical(&xs, Interval::closed(lo, hi)).expect("samples lie in their range")
}

/// Alternating-sign sequence like the ones the Ak computation produces.
pub fn alternating_sequence(len: usize, seed: u64) -> WeightedSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (0..len)
        .map(|i| {
            let x: f64 = rng.random_range(0.0..1.0);
            if i % 2 == 0 { x } else { -x }
        })
        .collect();
    WeightedSequence::new(w).expect("nonempty")
}

pub fn random_polynomial(degree: usize, seed: u64) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    Polynomial::new(coeffs, Interval::closed(-1.0, 1.0))
}
