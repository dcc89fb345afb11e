//! Seed derivation and the RNG type used throughout the crate.
//!
//! Every random quantity is drawn from a [`SeededRng`] whose seed is derived
//! from a master seed and a path of stream labels (item index, trial index,
//! purpose tag). Streams with different paths are statistically independent,
//! and extending one dimension (more agents, more trials) never perturbs the
//! draws of another stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG handle. Callers own their handle; nothing is global.
pub type SeededRng = ChaCha8Rng;

/// Stream tags, so distinct uses of the same (seed, index) never share draws.
pub mod tag {
    pub const ITEM_SPEC: u64 = 0x5350_4543;
    pub const ITEM_VALUES: u64 = 0x5641_4c53;
    pub const SAMPLING: u64 = 0x5341_4d50;
    pub const TRIAL: u64 = 0x5452_494c;
    pub const GRAPH: u64 = 0x4752_5048;
    pub const SIZE: u64 = 0x5349_5a45;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `parts` into `seed`, one splitmix round per part.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// RNG for the stream identified by `seed` and `parts`.
pub fn stream(seed: u64, parts: &[u64]) -> SeededRng {
    SeededRng::seed_from_u64(derive_seed(seed, parts))
}
