//! Counter-based random streams.
//!
//! A [`RngStream`] is an immutable ChaCha8 key derived from a master seed and
//! a path of labels. ChaCha is a counter-mode generator, so uniform draw `i`
//! is a pure function of `(key, i)` and any worker can produce any draw
//! without coordination. Child keys are read from reserved ChaCha streams of
//! the parent key; the parent is never mutated.
//!
//! Within one key, stream 0 carries uniforms (one 64-bit word pair per draw)
//! and stream 1 carries normals, which are consumed sequentially.

use alloc::vec::Vec;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

const UNIFORM_STREAM: u64 = 0;
const NORMAL_STREAM: u64 = 1;
const CHILD_STREAM: u64 = u64::MAX;
const PURPOSE_STREAM: u64 = u64::MAX - 1;

/// 32-bit words per derived key.
const KEY_WORDS: u128 = 8;

/// Purpose tags keep Brownian and offset randomness on disjoint streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Brownian,
    Offsets,
    /// Offsets for the reference solution, independent of every ladder level.
    OffsetsRef,
    /// Random evaluation points for Hölder probes and other diagnostics.
    Probe,
}

impl Purpose {
    fn id(self) -> u128 {
        match self {
            Purpose::Brownian => 0,
            Purpose::Offsets => 1,
            Purpose::OffsetsRef => 2,
            Purpose::Probe => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    master_seed: u64,
    path: Vec<u64>,
    key: [u8; 32],
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            path: Vec::new(),
            key: ChaCha8Rng::seed_from_u64(master_seed).get_seed(),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Labels from the root to this stream. Purposes are not recorded.
    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Derive an indexed child, e.g. one per Monte Carlo sample or per level.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self {
            master_seed: self.master_seed,
            path,
            key: self.derive(CHILD_STREAM, index as u128),
        }
    }

    pub fn purpose(&self, purpose: Purpose) -> Self {
        Self {
            master_seed: self.master_seed,
            path: self.path.clone(),
            key: self.derive(PURPOSE_STREAM, purpose.id()),
        }
    }

    fn derive(&self, stream: u64, slot: u128) -> [u8; 32] {
        let mut rng = self.generator(stream, slot * KEY_WORDS);
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        key
    }

    fn generator(&self, stream: u64, word: u128) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(stream);
        rng.set_word_pos(word);
        rng
    }

    /// Raw 64-bit word at position `counter` of the uniform stream.
    pub fn bits(&self, counter: u64) -> u64 {
        self.generator(UNIFORM_STREAM, 2 * counter as u128)
            .next_u64()
    }

    /// Uniform draw in the open interval (0, 1) at position `counter`.
    pub fn uniform(&self, counter: u64) -> f64 {
        Open01.sample(&mut self.generator(UNIFORM_STREAM, 2 * counter as u128))
    }

    /// Fill `out` with `scale` times i.i.d. standard normals.
    pub fn fill_normals(&self, out: &mut [f64], scale: f64) {
        let mut rng = self.generator(NORMAL_STREAM, 0);
        for slot in out.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *slot = scale * z;
        }
    }

    /// Fill `out` with the uniform draws at counters `0..out.len()`.
    pub fn fill_uniform(&self, out: &mut [f64]) {
        let mut rng = self.generator(UNIFORM_STREAM, 0);
        for slot in out.iter_mut() {
            *slot = Open01.sample(&mut rng);
        }
    }
}
