//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a [`Stream`] keyed by a
//! master seed plus a small tuple of indices (experiment tag, sample index,
//! generation, ...). A stream is a ChaCha8 keystream whose key is the packed
//! tuple, so draw `j` of a stream is a pure function of `(key, j)`. Results
//! therefore do not depend on how work is scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Domain tags keep unrelated consumers of the same master seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    /// Child counts of a quenched tree sample.
    Tree = 0x7472_6565,
    /// Generation-pool law propagation.
    Pool = 0x706f_6f6c,
    /// Generation sizes (martingale sampling).
    Generations = 0x6765_6e73,
    /// Test corpora and property suites.
    Corpus = 0x636f_7270,
}

/// A reproducible stream of random words.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Stream keyed by `(master_seed, domain, a, b)`.
    pub fn new(master_seed: u64, domain: Domain, a: u64, b: u64) -> Self {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
        key[16..24].copy_from_slice(&a.to_le_bytes());
        key[24..32].copy_from_slice(&b.to_le_bytes());
        Self {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    /// Stream for one quenched tree sample.
    pub fn for_tree(master_seed: u64, sample_index: u64) -> Self {
        Self::new(master_seed, Domain::Tree, sample_index, 0)
    }

    /// Uniform in the open interval (0, 1); consumes exactly one 64-bit word.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Number of 32-bit words consumed so far (the stream counter).
    pub fn word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Underlying generator, for distributions from `rand_distr`.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
