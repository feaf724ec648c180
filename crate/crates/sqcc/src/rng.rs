//! Deterministic per-shot random streams.
//!
//! Every shot of a campaign draws from its own ChaCha substream, indexed by
//! the shot counter. Results are therefore independent of batching, thread
//! count and scheduling order, and a campaign is fully reproducible from
//! `(seed, shot_index)` alone.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for one shot: a ChaCha8 stream selected by the shot counter.
pub fn shot_rng(seed: u64, shot_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot_index);
    rng
}
