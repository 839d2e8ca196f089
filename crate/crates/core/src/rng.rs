//! Deterministic per-sample random streams.
//!
//! Every sample draws from its own ChaCha8 stream keyed by the master seed, with the
//! stream id derived from `(key, sample index)`. Results therefore do not depend on
//! how samples are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for sample `sample` under sub-key `key` (e.g. a dilation id).
pub fn sample_rng(master_seed: u64, key: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(mix64(mix64(key) ^ sample.rotate_left(17)));
    rng
}

/// Stable sub-key for a dilation factor (its bit pattern).
pub fn dilation_key(r: f64) -> u64 {
    mix64(r.to_bits())
}
