//! Keyed random streams.
//!
//! Every consumer of randomness derives its own generator from
//! `(seed, key, purpose)`, so draws for one node never depend on how many
//! draws another node consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::xxh3_64;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes a seed, an integer key and a purpose label into one 64-bit value.
pub fn derive_seed(seed: u64, key: u64, purpose: &str) -> u64 {
    let a = splitmix64(seed);
    let b = splitmix64(a ^ key.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(b ^ xxh3_64(purpose.as_bytes()))
}

pub fn stream(seed: u64, key: u64, purpose: &str) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, key, purpose))
}
