//! Counter-based random streams.
//!
//! A stream is a pure function of the run seed and a [`StreamId`], so any
//! replication can be regenerated in isolation and parallel schedules do not
//! change results.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// Rewards of one arm.
    Reward(u32),
    Policy,
    Bcp,
    Verify(u32),
    Other(u64),
}

impl Purpose {
    fn code(self) -> u64 {
        match self {
            Purpose::Reward(k) => 1 << 32 | k as u64,
            Purpose::Policy => 2 << 32,
            Purpose::Bcp => 3 << 32,
            Purpose::Verify(k) => 4 << 32 | k as u64,
            Purpose::Other(x) => splitmix(5 << 32 ^ x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub replication: u64,
    pub step: u64,
    pub purpose: Purpose,
}

impl StreamId {
    pub fn new(replication: u64, step: u64, purpose: Purpose) -> Self {
        Self { replication, step, purpose }
    }
}

pub fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        let mut key = [0u8; 32];
        let mut z = splitmix(seed);
        let parts = [z, id.replication, id.step, id.purpose.code()];
        for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
            z = splitmix(z ^ parts[i].wrapping_mul(0xd6e8_feb8_6659_fd93));
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(id.purpose.code());
        Self(rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
