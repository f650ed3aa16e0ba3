//! Seeded randomness.
//!
//! Everything random in the toolkit is driven by SplitMix64 (Steele, Lea &
//! Flood), version 1 of the shuffle procedure below:
//!
//! * state advances by `0x9E3779B97F4A7C15`; output is the state mixed with
//!   `(z ^ z>>30) * 0xBF58476D1CE4E5B9`, `(z ^ z>>27) * 0x94D049BB133111EB`,
//!   `z ^ z>>31`;
//! * a uniform index below `bound` rejects draws smaller than
//!   `(2^64 - bound) mod bound` and returns `draw mod bound`;
//! * Fisher–Yates runs `i` from `len-1` down to `1`, swapping `i` with a
//!   uniform index below `i+1`.
//!
//! Any implementation following these steps reproduces the same document
//! splits for the same seed.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub const SHUFFLE_VERSION: u32 = 1;

pub type Rng = SplitMix64;

pub fn seeded(seed: u64) -> Rng {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform integer in `0..bound` by rejection; `bound` must be nonzero.
pub fn uniform_index(rng: &mut Rng, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let x = rng.next_u64();
        if x >= threshold {
            return x % bound;
        }
    }
}

pub fn shuffle<T>(rng: &mut Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_index(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// Uniform float in `[0, 1)` from the top 53 bits.
pub fn unit_f64(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform_f64(rng: &mut Rng, low: f64, high: f64) -> f64 {
    low + (high - low) * unit_f64(rng)
}
