//! Deterministic per-trial seeding.
//!
//! A trial's seed is `mix(master, tag, index)`: the experiment tag is hashed
//! with FNV-1a, then the three words are folded through the SplitMix64
//! finalizer. Every trial owns an independent ChaCha8 stream, so results do
//! not depend on how trials are spread over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

pub fn mix(master: u64, tag: &str, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ fnv1a(tag)) ^ index)
}

pub fn trial_rng(master: u64, tag: &str, index: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(mix(master, tag, index))
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Run `f` over trial indices `0..trials` on the rayon pool and return the
/// results in index order.
pub fn par_trials<T: Send>(trials: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}
