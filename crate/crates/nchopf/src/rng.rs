//! Seeded random sources for reproducible sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a seed and a stream label.
pub fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
