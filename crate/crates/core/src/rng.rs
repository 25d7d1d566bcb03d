//! Versioned random-number plumbing.
//!
//! Splits and bootstrap resamples must be reproducible across releases, so
//! the index-drawing and shuffling algorithms live here instead of relying on
//! `rand`'s convenience methods, whose output may change between versions.
//! Only the ChaCha8 keystream itself is taken from `rand_chacha`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier recorded in manifests and results. Bump it whenever any
/// function below changes its output for a given seed.
pub const PRNG_SCHEME: &str = "chacha8/lemire-bounded/fisher-yates-v1";

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator seeded by `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform integer in `[0, bound)` using Lemire's multiply-and-reject method.
pub fn bounded<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "bound must be positive");
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(bound);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T, R: RngCore>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = bounded(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}
