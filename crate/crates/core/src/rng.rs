//! Counter-based seed splitting.
//!
//! Every replication draws from three independent ChaCha streams whose keys
//! are derived from `(base_seed, run_index, stream)` with a SplitMix64-style
//! mixer. Scenario identity is deliberately not part of the key, so two
//! scenarios that share a base seed face the same landscapes and the same
//! initial configurations run by run (common random numbers).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random streams used by one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Landscape = 1,
    Initial = 2,
    Process = 3,
}

/// The RNG type used throughout the crate.
pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the 64-bit seed of `stream` for replication `run_index`.
pub fn derive_seed(base_seed: u64, run_index: u64, stream: Stream) -> u64 {
    let mut h = splitmix64(base_seed);
    h = splitmix64(h ^ run_index.wrapping_mul(0xd1b5_4a32_d192_ed03));
    splitmix64(h ^ (stream as u64).wrapping_mul(0x8cb9_2ba7_2f3d_8dd7))
}

pub fn stream_rng(base_seed: u64, run_index: u64, stream: Stream) -> SimRng {
    SimRng::seed_from_u64(derive_seed(base_seed, run_index, stream))
}

/// A generator seeded directly, for callers outside the replication scheme.
pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(splitmix64(seed))
}
