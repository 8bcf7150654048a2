//! Seeded generators. Every random draw in the crate goes through a
//! ChaCha8 stream derived from a `u64` master seed, so results are
//! reproducible across platforms and independent of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Generator for `stream` of the master `seed`. Distinct streams of the same
/// seed are independent; chunked and per-sequence work uses one stream each.
pub fn seeded_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
