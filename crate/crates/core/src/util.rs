//! Seeded random streams shared by data generation, training, and the
//! Monte-Carlo oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic counter-based stream: one base seed, independent
/// streams selected by index. Stream ids are namespaced by the caller
/// (data splits, training epochs, oracle chunks) so the same base seed
/// never reuses a stream for two purposes.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
