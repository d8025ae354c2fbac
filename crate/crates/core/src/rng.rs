//! Seeded, stream-derived randomness.
//!
//! Every consumer of randomness (a client's local training in a round, a
//! baseline attacker crafting for one receiver, data generation) draws from
//! its own stream derived from `(seed, labels...)`. Streams never share
//! state, so results are identical whether work runs sequentially or in
//! parallel.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream labels used by the simulator.
pub mod stream {
    pub const DATA: u64 = 1;
    pub const TEST_DATA: u64 = 2;
    pub const PARTITION: u64 = 3;
    pub const TRAIN: u64 = 4;
    pub const GAUSSIAN: u64 = 5;
    pub const TRIM: u64 = 6;
    pub const SPLIT: u64 = 7;
}

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream keyed by this generator's seed and `labels`.
    /// Does not consume from `self`.
    pub fn derive(&self, labels: &[u64]) -> Rng {
        let key = labels
            .iter()
            .fold(splitmix64(self.seed ^ 0x5eed_5eed_5eed_5eed), |acc, &label| {
                splitmix64(acc ^ splitmix64(label.wrapping_add(0x9e37_79b9_7f4a_7c15)))
            });
        Rng::new(key)
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
