//! Seedable, splittable random streams.
//!
//! A stream is ChaCha8 keyed by `seed_from_u64(seed)` with the 64-bit
//! `stream_index` installed as the ChaCha nonce. rand_chacha guarantees
//! platform- and version-stable output for a fixed (key, nonce), so a
//! given `(seed, stream_index)` pair reproduces the same draws everywhere,
//! independent of scheduling. Uniforms are the 53-bit midpoint convention
//! `(k + 1/2) * 2^-53`, strictly inside (0, 1).

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        RngStream {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// SplitMix64 finalizer; mixes a word into a well-distributed one.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a, used to hash canonical rule strings into stream indices.
/// Stable by construction, unlike `DefaultHasher`.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Stream index for the Monte Carlo cell `(tag, n, rep)`. Keyed by values,
/// not list positions, so extending a study never perturbs existing cells.
pub fn derive_stream(tag: &str, n: usize, rep: u64) -> u64 {
    let cell = mix64(fnv1a64(tag.as_bytes()) ^ mix64(n as u64));
    cell.wrapping_add(rep)
}
