//! Seed plumbing. Every random stream in the crate is a ChaCha8 generator
//! whose seed is derived from the run seed plus a stream tag, so no two
//! consumers share state and nothing reads ambient entropy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a list of stream tags.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

pub(crate) mod tags {
    pub const NOISE: u64 = 1;
    pub const SHUFFLE: u64 = 2;
    pub const PERTURB: u64 = 3;
    pub const GRADCHECK: u64 = 4;
    pub const SYNTH: u64 = 5;
    pub const CROP: u64 = 6;
}
