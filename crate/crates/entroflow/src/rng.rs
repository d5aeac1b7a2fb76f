//! Deterministic, splittable random streams.
//!
//! Every randomized operation in this crate draws from an explicit stream
//! handle; nothing touches global RNG state. A stream is a ChaCha8 generator
//! seeded from a `(master seed, stream index)` pair through a SplitMix64
//! mix, so independent draws can be handed out by index without the streams
//! sharing state, and a run is reproducible from its master seed alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The concrete generator behind every stream handle.
pub type RngStream = ChaCha8Rng;

/// SplitMix64 finalizer: a cheap, well-mixed 64-bit permutation.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives the 64-bit seed of stream `index` under `master`.
///
/// This is the SplitMix64 sequence seeded at `master`, jumped forward by
/// `index` increments of the golden-ratio constant and finalized, so master
/// seeds (or stream indices) that differ by 1 still land in unrelated parts
/// of the seed space.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    let jumped = splitmix64(master).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    splitmix64(jumped)
}

/// Opens stream `index` of the family defined by `master`.
pub fn stream(master: u64, index: u64) -> RngStream {
    RngStream::seed_from_u64(stream_seed(master, index))
}

/// Reopens a stream from a raw seed, e.g. one recorded in a report. The
/// draws of `stream(m, i)` replay from `from_seed(stream_seed(m, i))`.
pub fn from_seed(seed: u64) -> RngStream {
    RngStream::seed_from_u64(seed)
}
