//! Seed-indexed random streams.
//!
//! A [`StreamKey`] is a master seed plus a path of integer labels. Each key
//! maps to an independent ChaCha8 stream, so a replicate's randomness depends
//! only on its index and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Labels for the named sub-streams of a replicate.
pub mod label {
    pub const SAMPLE: u64 = 0x5341_4d50;
    pub const RADEMACHER: u64 = 0x5241_4445;
    pub const REPLICATE: u64 = 0x5245_504c;
    pub const BROWNIAN: u64 = 0x4252_4f57;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub seed: u64,
    pub path: Vec<u64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        Self { seed, path: Vec::new() }
    }

    pub fn child(&self, label: u64) -> Self {
        let mut path = self.path.clone();
        path.push(label);
        Self { seed: self.seed, path }
    }

    pub fn replicate(&self, index: u64) -> Self {
        self.child(label::REPLICATE).child(index)
    }

    fn fold(&self) -> u64 {
        self.path
            .iter()
            .fold(splitmix64(self.seed), |h, &p| splitmix64(h ^ splitmix64(p)))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.fold())
    }
}
