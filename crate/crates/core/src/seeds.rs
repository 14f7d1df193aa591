//! Seed derivation. Every random stream in the crate is keyed by a tuple of
//! integers folded through a 64-bit finalizer, so results never depend on
//! thread scheduling.

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a key tuple into one seed.
pub fn derive(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x5eed_u64, |acc, &p| mix64(acc ^ mix64(p)))
}

/// Per-shot seed for Monte Carlo runs.
pub fn shot_seed(master: u64, stream: u64, shot: u64) -> u64 {
    derive(&[master, stream, shot])
}
