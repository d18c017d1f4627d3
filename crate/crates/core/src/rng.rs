//! Seed discipline for ensemble runs.
//!
//! Every graph in an experiment is drawn from its own ChaCha8 stream whose
//! seed depends only on `(master seed, grid index, sample index)`, so results
//! do not depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sample `sample` at grid point `grid` of a run seeded with `master`.
pub fn derive_seed(master: u64, grid: u64, sample: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ grid) ^ sample.rotate_left(32))
}

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}
