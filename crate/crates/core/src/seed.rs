//! Deterministic seed derivation. Every chain, replicate and allocation draw
//! gets its own stream derived from a base seed and a tag path, so results do
//! not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every stochastic routine in the crate.
pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for `stream` from `seed`.
pub fn derive(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_mul(0xD6E8_FEB8_6659_FD93)))
}

/// Derives a child seed along a path of stream tags.
pub fn derive_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &t| derive(s, t))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Stream tags shared by the modules that split seeds.
pub(crate) const TAG_ALLOCATION: u64 = 1;
pub(crate) const TAG_CHAIN: u64 = 2;
pub(crate) const TAG_REPLICATE: u64 = 3;
pub(crate) const TAG_PARAMS: u64 = 4;
pub(crate) const TAG_UNIT: u64 = 5;
pub(crate) const TAG_DATA: u64 = 6;
pub(crate) const TAG_TRUTH: u64 = 7;
pub(crate) const TAG_GRAPH: u64 = 8;
pub(crate) const TAG_EFFECTS: u64 = 9;
