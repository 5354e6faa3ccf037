//! Seed derivation and sampling helpers.
//!
//! All randomness in the crate flows through ChaCha8 streams keyed by a
//! base seed plus a string tag and an index, so results are reproducible
//! across runs, platforms, and iteration order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::tensor::Tensor;

/// Stable 64-bit FNV-1a over arbitrary bytes. Used instead of the std
/// hasher because `RandomState` is randomized per process.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derive a sub-seed from a base seed, a tag, and an index.
pub fn subseed(base: u64, tag: &str, index: u64) -> u64 {
    let mut bytes = Vec::with_capacity(16 + tag.len());
    bytes.extend_from_slice(&base.to_le_bytes());
    bytes.extend_from_slice(tag.as_bytes());
    bytes.extend_from_slice(&index.to_le_bytes());
    fnv1a(&bytes)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tensor with i.i.d. standard-normal entries.
pub fn standard_normal(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    Tensor::from_fn(shape, |_| StandardNormal.sample(rng))
}

/// Tensor with i.i.d. uniform entries in `[-bound, bound]`.
pub fn uniform_symmetric(rng: &mut ChaCha8Rng, shape: &[usize], bound: f64) -> Tensor {
    use rand::Rng;
    Tensor::from_fn(shape, |_| rng.random_range(-bound..=bound))
}
