//! Counter-based seed derivation.
//!
//! Every random stream in the toolkit is seeded from a tuple of integers
//! (run seed, direction code, layer, ordinal, ...) through a SplitMix64-style
//! finalizer, so the stream a given query sees never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash an ordered list of words into one 64-bit value.
pub fn hash64(words: &[u64]) -> u64 {
    let mut h = mix(GOLDEN ^ words.len() as u64);
    for (i, &w) in words.iter().enumerate() {
        h = mix(h ^ mix(w.wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1))));
    }
    h
}

/// A ChaCha8 stream keyed by `words`.
pub fn stream(words: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(hash64(words))
}

// Domain tags keep streams for different purposes apart even when the
// remaining words coincide.
pub(crate) const TAG_RETRIEVAL: u64 = 0x5245_5452;
pub(crate) const TAG_SYNTH: u64 = 0x5359_4e54;
pub(crate) const TAG_OPTIM: u64 = 0x4f50_5449;
pub(crate) const TAG_TSNE: u64 = 0x5453_4e45;
