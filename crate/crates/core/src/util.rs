//! Rounding and seed-derivation helpers shared by the generators and the harness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random source used throughout; portable and reproducible from a `u64` seed.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Absorbs representation error such as 0.15 * 20 = 3.0000000000000004 or 2.9999999999999996.
const ROUNDING_SLACK: f64 = 1e-9;

/// `round(x)` with halves rounded up, for non-negative `x`.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5 + ROUNDING_SLACK).floor().max(0.0) as usize
}

pub(crate) fn floor_slack(x: f64) -> usize {
    (x + ROUNDING_SLACK).floor().max(0.0) as usize
}

/// Number of nodes a fraction of `n` selects.
pub fn quota(fraction: f64, n: usize) -> usize {
    round_half_up(fraction * n as f64).min(n)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into a seed: `h = mix64(h ^ w)` starting from `base`.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    words.iter().fold(mix64(base), |h, &w| mix64(h ^ w))
}

/// 64-bit FNV-1a, used to key cached artifacts by their textual description.
pub fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
