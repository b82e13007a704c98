//! Deterministic, splittable random streams.
//!
//! Every stochastic quantity in the crate is drawn from a ChaCha stream derived
//! from a 64-bit master seed and a path of integer labels (trial, link, drop,
//! ...). Two streams with different label paths are statistically independent,
//! and the same path always reproduces the same stream, so results do not depend
//! on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a label path into a single 64-bit key.
pub fn derive_key(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(seed), |acc, &l| splitmix64(acc ^ splitmix64(l.wrapping_add(0xA5A5))))
}

/// Stream for `(seed, labels...)`.
pub fn stream(seed: u64, labels: &[u64]) -> StreamRng {
    let key = derive_key(seed, labels);
    let mut bytes = [0u8; 32];
    let mut k = key;
    for chunk in bytes.chunks_mut(8) {
        k = splitmix64(k);
        chunk.copy_from_slice(&k.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}
