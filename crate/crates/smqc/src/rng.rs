//! Seeded randomness. A single deterministic generator is threaded through
//! every sampling site so that a run is a pure function of (seed, input).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The simulator's random source. Deterministic and portable across platforms.
pub type SimRng = ChaCha8Rng;

/// Generator seeded directly from a `u64`.
pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream for a labeled subsystem of a run (key streams,
/// per-circuit seeds in property suites).
pub fn substream(seed: u64, label: u64) -> SimRng {
    SimRng::seed_from_u64(seed ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}
