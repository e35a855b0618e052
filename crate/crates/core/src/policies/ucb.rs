//! Upper-confidence-bound selection with a tunable exploration strength.

use rand_chacha::ChaCha8Rng;

use super::{argmax, Policy, PolicyError};

/// UCB state: empirical means, pull counts, the round counter feeding the
/// bonus, and the exploration strength `beta`.
///
/// Each arm is force-pulled once before the index rule takes over; the
/// round counter starts at zero and counts those initialization rounds,
/// so the first index-based selection sees `t = k`.
#[derive(Debug, Clone)]
pub struct Ucb {
    beta: f64,
    means: Vec<f64>,
    counts: Vec<u64>,
    round: u64,
}

impl Ucb {
    pub fn new(k: usize, beta: f64) -> Self {
        Ucb {
            beta,
            means: vec![0.0; k],
            counts: vec![0; k],
            round: 0,
        }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// The index rule: `argmax μ̂_i + β √(2 ln t / n_i)`.
    ///
    /// Errors until every arm has been pulled once.
    pub fn select_by_index(&self) -> Result<usize, PolicyError> {
        if self.counts.contains(&0) {
            return Err(PolicyError::InitIncomplete);
        }
        let ln_t = (self.round as f64).ln();
        Ok(argmax(self.means.iter().zip(&self.counts).map(
            |(&m, &n)| m + self.beta * (2.0 * ln_t / n as f64).sqrt(),
        )))
    }

    /// Incremental-mean update for one observation of `arm`.
    pub fn observe(&mut self, arm: usize, reward: f64) -> Result<(), PolicyError> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(PolicyError::RewardOutOfRange(reward));
        }
        let n = self.counts[arm] as f64;
        self.means[arm] = (self.means[arm] * n + reward) / (n + 1.0);
        self.counts[arm] += 1;
        self.round += 1;
        Ok(())
    }

    fn uninitialized_arm(&self) -> Option<usize> {
        self.counts.iter().position(|&n| n == 0)
    }
}

impl Policy for Ucb {
    fn k(&self) -> usize {
        self.means.len()
    }

    fn select(&mut self, _round: u64, _rng: &mut ChaCha8Rng) -> usize {
        match self.uninitialized_arm() {
            Some(arm) => arm,
            None => self.select_by_index().expect("init complete"),
        }
    }

    fn update(&mut self, arm: usize, reward: f64, _tokens_emitted: u32) {
        self.observe(arm, reward).expect("rewards lie in [0, 1]");
    }

    fn reset(&mut self) {
        self.means.fill(0.0);
        self.counts.fill(0);
        self.round = 0;
    }
}
