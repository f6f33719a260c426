//! Reproducible random streams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

/// A ChaCha8 generator addressed by `(seed, stream)`.
///
/// Stream `k` is reachable directly through ChaCha's stream selector, so
/// parallel workers never have to skip over other workers' draws.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh stream derived from the same seed.
    pub fn substream(&self, stream: u64) -> Self {
        RngStream::new(self.seed, stream)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.rng.sample(StandardNormal);
        }
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn exp1(&mut self) -> f64 {
        self.rng.sample(Exp1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
