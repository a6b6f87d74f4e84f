//! Counter-based random streams.
//!
//! A stream is ChaCha8 keyed by the master seed, with the replication index
//! as the 64-bit nonce and the block counter as the draw position. Output is
//! therefore a pure function of `(master_seed, replication_index, counter)`,
//! and replications can run in any order on any number of workers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// ChaCha key derived once from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    master_seed: u64,
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(master_seed: u64) -> Self {
        let key = ChaCha8Rng::seed_from_u64(master_seed).get_seed();
        StreamKey { master_seed, key }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream(&self, replication_index: u64) -> RandomStream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(replication_index);
        RandomStream {
            master_seed: self.master_seed,
            replication_index,
            rng,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    replication_index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, replication_index: u64) -> Self {
        StreamKey::new(master_seed).stream(replication_index)
    }

    /// Replays a stream from a position previously read with [`Self::counter`].
    pub fn at(master_seed: u64, replication_index: u64, counter: u128) -> Self {
        let mut s = Self::new(master_seed, replication_index);
        s.rng.set_word_pos(counter);
        s
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn replication_index(&self) -> u64 {
        self.replication_index
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.rng.next_u32() & 1 == 1
    }

    /// Standard normal draw (ziggurat).
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

impl RngCore for RandomStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
