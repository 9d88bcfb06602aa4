//! Seed derivation for independent, scheduling-free random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream used throughout the crate.
pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a master seed and a tuple of labels into a child seed.
///
/// Distinct label tuples give statistically independent children, and the
/// result depends only on the inputs (never on call order).
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for (i, &label) in labels.iter().enumerate() {
        h = splitmix64(h ^ splitmix64(label.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN))));
    }
    h
}

pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}
