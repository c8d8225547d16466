//! Deterministic random-stream derivation.
//!
//! Every stochastic draw in the crate is keyed by a tuple of integers
//! (master seed, realization index, purpose tag, ...) so results do not
//! depend on evaluation order or on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream purposes, kept stable so that seeds mean the same thing across versions.
pub mod tag {
    pub const CHANNEL: u64 = 0x4348;
    pub const THETA_INIT: u64 = 0x5448;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a key tuple into a 64-bit seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &p| splitmix(acc ^ splitmix(p)))
}

pub fn stream(parts: &[u64]) -> Stream {
    Stream::seed_from_u64(derive_seed(parts))
}
