//! Reference policies: the schedule-aware oracle and uniform random.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{argmax, Policy};
use crate::env::DrafterProfile;

/// Plays the arm with the highest true mean acceptance rate at each
/// round, following any schedule changes instantly.
#[derive(Debug, Clone)]
pub struct OraclePolicy {
    profiles: Vec<DrafterProfile>,
}

impl OraclePolicy {
    pub fn new(profiles: Vec<DrafterProfile>) -> Self {
        OraclePolicy { profiles }
    }

    /// The true best arm at the given round.
    pub fn best_arm(&self, round: u64) -> usize {
        argmax(self.profiles.iter().map(|p| p.mean_at(round)))
    }
}

impl Policy for OraclePolicy {
    fn k(&self) -> usize {
        self.profiles.len()
    }

    fn select(&mut self, round: u64, _rng: &mut ChaCha8Rng) -> usize {
        self.best_arm(round)
    }

    fn update(&mut self, _arm: usize, _reward: f64, _tokens_emitted: u32) {}

    fn reset(&mut self) {}
}

/// Uniformly random selection.
#[derive(Debug, Clone)]
pub struct UniformRandom {
    k: usize,
}

impl UniformRandom {
    pub fn new(k: usize) -> Self {
        UniformRandom { k }
    }
}

impl Policy for UniformRandom {
    fn k(&self) -> usize {
        self.k
    }

    fn select(&mut self, _round: u64, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(0..self.k)
    }

    fn update(&mut self, _arm: usize, _reward: f64, _tokens_emitted: u32) {}

    fn reset(&mut self) {}
}
