//! Deterministic, splittable random streams. A master seed expands into
//! independent per-sample streams through a counter-based mix, so a batch
//! gives identical results whether samples run serially or across a pool.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; a good 64-bit mixer for counter-based splitting.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The RNG used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Independent stream for sample `index` under `master`.
pub fn stream(master: u64, index: u64) -> Stream {
    let mut seed = [0u8; 32];
    let mut s = splitmix64(master ^ splitmix64(index.wrapping_add(0xA5A5_A5A5)));
    for chunk in seed.chunks_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    Stream::from_seed(seed)
}

/// Sub-stream for labeled components within one sample (e.g. "loops",
/// "excursions") so adding draws to one component does not shift another.
pub fn substream(master: u64, index: u64, label: u64) -> Stream {
    stream(splitmix64(master ^ splitmix64(label)), index)
}
