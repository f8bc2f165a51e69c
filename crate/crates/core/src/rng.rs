//! Seeded random streams. Trajectory `i` of a run seeded with `s` draws from
//! ChaCha8 keyed by `s ^ i`, so runs are reproducible and independent of
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// Uniform on the open interval `(0, 1)`.
pub fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    ((rng.gen::<u64>() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Exponential waiting time with the given rate, by inversion.
pub fn exponential<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    -open_unit(rng).ln() / rate
}
