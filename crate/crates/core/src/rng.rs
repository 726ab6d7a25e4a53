//! Deterministic random-number plumbing.
//!
//! All sampling in the crate derives from a user-supplied `u64` seed. Distinct
//! logical streams (trajectories, batches) get independent generators by
//! hashing `(seed, stream)` through SplitMix64 before keying a ChaCha
//! generator, so stream i is reproducible regardless of how many other
//! streams were drawn.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 finalizer; bijective on u64.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the sub-seed for a logical stream.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Generator for one logical stream of a run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(stream_seed(seed, stream))
}
