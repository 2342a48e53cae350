//! Seed derivation. Every sampler takes an explicit RNG; replicate streams
//! are derived from a base seed with the SplitMix64 finalizer so that any
//! replicate can be regenerated on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout. ChaCha8 output is stable across platforms and
/// crate versions, which the byte-identical output requirement relies on.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `base`: the `index+1`-th SplitMix64 output
/// of a generator started at `base`.
pub fn child_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
