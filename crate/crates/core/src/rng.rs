//! Seeded, splittable randomness.
//!
//! Every stochastic stage draws from an [`RngStream`] identified by a
//! `(seed, stream)` pair. Streams are ChaCha20 keystreams with the stream id
//! in the nonce, so substreams never overlap and replay bit-identically.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Fresh stream derived from this one's identity (not its position).
    pub fn substream(&self, id: u64) -> RngStream {
        RngStream::new(self.seed, splitmix(self.stream ^ splitmix(id.wrapping_add(1))))
    }

    /// Two 16-bit uniforms mapped to `(0, 1]` and `[0, 1)`, the input domain
    /// of [`crate::dsp::box_muller`].
    pub fn uniform16_pair(&mut self) -> (f64, f64) {
        let word = self.inner.next_u32();
        let hi = (word >> 16) as f64;
        let lo = (word & 0xffff) as f64;
        ((hi + 1.0) / 65536.0, lo / 65536.0)
    }

    /// Two 53-bit uniforms mapped to `(0, 1]` and `[0, 1)`.
    pub fn uniform53_pair(&mut self) -> (f64, f64) {
        let scale = 1.0 / (1u64 << 53) as f64;
        let a = (self.inner.next_u64() >> 11) as f64;
        let b = (self.inner.next_u64() >> 11) as f64;
        ((a + 1.0) * scale, b * scale)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
