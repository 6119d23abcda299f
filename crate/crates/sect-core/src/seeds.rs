//! Deterministic substream derivation.
//!
//! Every random draw in the crate comes from a ChaCha stream seeded by a
//! master seed folded with a path of component ids (replicate index,
//! shape index, parameter slot, ...). Results are therefore bit-identical
//! regardless of scheduling or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer, used as the mixing function.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a component path into a master seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut state = mix(seed ^ 0x5851_F42D_4C95_7F2D);
    for &component in path {
        state = mix(state ^ mix(component));
    }
    state
}

/// Independent RNG for the given path.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}
