//! Deterministic seed derivation.
//!
//! Campaigns derive one seed per drop from `(base_seed, drop_index)`, and
//! each drop derives independent substreams for placement, shadowing and
//! role assignment. ChaCha8 keeps every stream stable across platforms and
//! across parallel execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Substream labels used within a single drop.
pub mod stream {
    pub const PLACEMENT: u64 = 1;
    pub const SHADOWING: u64 = 2;
    pub const ROLES: u64 = 3;
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a stream label into an independent seed.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// RNG for the given `(base, stream)` pair.
pub fn seeded_rng(base: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream))
}
