//! Seeded randomness for instance generators.
//!
//! All generators draw from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64`, and normals from `rand_distr::StandardNormal`. Draw order
//! is part of each generator's contract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub(crate) struct InstanceRng(ChaCha20Rng);

impl InstanceRng {
    pub(crate) fn new(seed: u64) -> Self {
        Self(ChaCha20Rng::seed_from_u64(seed))
    }

    pub(crate) fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub(crate) fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..hi)
    }

    pub(crate) fn bernoulli(&mut self, p: f64) -> bool {
        // p == 1 is always true; random::<f64>() lies in [0, 1).
        self.0.random::<f64>() < p
    }
}
