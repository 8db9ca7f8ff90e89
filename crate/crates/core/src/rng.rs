//! Counter-based random streams.
//!
//! Every Monte Carlo path owns an independent [`RngStream`] addressed by
//! `(master_seed, stream_index)`. The generator is ChaCha8 keyed by the master
//! seed with the stream index selecting the ChaCha stream, so a path's draws
//! depend only on its address and never on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator used inside a single path's hot loop.
pub type PathRng = Xoshiro256PlusPlus;

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Child stream `index` of this stream. The child key mixes both parts of
    /// the parent address, so children of distinct parents never collide in
    /// practice and the derivation is independent of the parent's position.
    pub fn substream(&self, index: u64) -> RngStream {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_index.wrapping_add(0x632b_e59b_d9b4_e019)));
        RngStream::new(key, index)
    }

    /// A fast generator seeded from the next 256 bits of this stream. It is as
    /// reproducible as the stream itself.
    pub fn path_rng(&mut self) -> PathRng {
        let mut seed = [0u8; 32];
        self.inner.fill_bytes(&mut seed);
        PathRng::from_seed(seed)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
