//! Shared inputs for the criterion benchmarks.

use barron_core::fixtures::random_sum;
use barron_core::AtomSum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded random torus sum with `n` atoms and frequencies in `[-4, 4]^dim`.
pub fn sample_sum(seed: u64, dim: usize, n: usize) -> AtomSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sum(&mut rng, dim, n, 4, true)
}
