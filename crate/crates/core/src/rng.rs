//! Seeded generators for environments and agents.
//!
//! Both come from ChaCha with 8 rounds, keyed by the run seed through
//! `SeedableRng::seed_from_u64`. The environment draws from stream 0 and the
//! agent from stream 1, so the arrival sequence of a seed is the same no
//! matter which agent runs against it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Recorded in run metadata.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64; env stream 0, agent stream 1)";

pub fn env_rng(seed: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

pub fn agent_rng(seed: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}
