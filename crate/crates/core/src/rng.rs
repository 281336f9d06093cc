//! Seeded random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] whose seed is
//! derived from a master seed and a path of labels, so that independent tasks
//! (rings, repetitions, center sets) get streams that do not depend on the
//! order in which they are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes `labels` into `master` to produce a child seed.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(master), |acc, &l| splitmix64(acc ^ splitmix64(l)))
}

pub fn stream(master: u64, labels: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, labels))
}

// Labels used to separate the streams of each pipeline stage.
pub(crate) const LABEL_APPROX: u64 = 0xA1;
pub(crate) const LABEL_RING: u64 = 0xB2;
pub(crate) const LABEL_SAMPLE: u64 = 0xC3;
pub(crate) const LABEL_CENTERS: u64 = 0xD4;
pub(crate) const LABEL_REP: u64 = 0xE5;
pub(crate) const LABEL_POOL: u64 = 0xF6;
