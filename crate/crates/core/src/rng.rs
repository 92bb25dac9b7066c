//! Seeded random number generation shared by every stochastic stage.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Portable, reproducible generator used throughout the crate.
pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for a sub-task (query index, chain, epoch).
pub fn derive(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.wrapping_add(1));
    rng
}
