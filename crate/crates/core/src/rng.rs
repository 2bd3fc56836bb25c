//! Deterministic stream derivation for reproducible simulations.
//!
//! Every random draw in this crate comes from a stream derived from a root
//! seed plus a path of integers (round, state, action, purpose). Two streams
//! with distinct paths are statistically independent; the same path always
//! yields the same stream, regardless of thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keeping distinct uses of randomness on distinct paths.
pub mod purpose {
    /// Bernoulli masking of states inside one estimation round.
    pub const MASK: u64 = 1;
    /// Truncated rollout used for a Q-value estimate.
    pub const ROLLOUT: u64 = 2;
    /// The live environment trajectory of a learning run.
    pub const TRAJECTORY: u64 = 3;
    /// Initial state draw of a learning run.
    pub const INIT_STATE: u64 = 4;
    /// Per-repetition seed of a batch of runs.
    pub const RUN: u64 = 5;
    /// Synthetic problem generation (random MDPs, policies, weights).
    pub const SYNTHETIC: u64 = 6;
    /// Priority permutation drawn at policy construction.
    pub const PERMUTATION: u64 = 7;
    /// Gain generators of the regret harness.
    pub const GAIN: u64 = 8;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a root seed with a derivation path into a child seed.
pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(root ^ 0xA076_1D64_78BD_642F);
    for &part in path {
        h = splitmix64(h ^ splitmix64(part ^ 0x5899_65CC_7537_4CC3));
    }
    h
}

/// A generator seeded from `derive_seed(root, path)`.
pub fn stream(root: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, path))
}
