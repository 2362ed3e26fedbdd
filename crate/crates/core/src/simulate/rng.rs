//! Keyed random streams.
//!
//! The stream for a draw is a function of `(master seed, replication, purpose)`
//! only, so results do not depend on how replications are scheduled.
//!
//! Key derivation: `k = splitmix64(splitmix64(seed) ⊕ splitmix64(rep + γ))`
//! with `γ = 0x9E3779B97F4A7C15`; four further splitmix64 steps from `k` fill
//! the 32-byte ChaCha8 key and the purpose tag selects the ChaCha stream id.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// What a stream is used for. Each sampler draws in a fixed order within a
/// stream: counts (per tier, in tier order), positions, marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    StationCount = 1,
    Positions = 2,
    Marks = 3,
}

/// SplitMix64 finalizer applied to `x + γ`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-replication key.
pub fn replication_key(seed: u64, replication: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(replication.wrapping_add(GOLDEN_GAMMA)))
}

pub fn stream(seed: u64, replication: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut state = replication_key(seed, replication);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(purpose as u64);
    rng
}
