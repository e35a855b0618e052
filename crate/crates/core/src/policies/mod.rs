//! Drafter-selection policies.
//!
//! Every policy implements [`Policy`]: select an arm for the coming
//! round, then observe the reward and the tokens it emitted. Ties in any
//! argmax break toward the lowest arm id so that runs are reproducible,
//! and the randomized policies draw only from the generator handed to
//! `select`.

mod baseline;
mod exp3;
mod halving;
mod nonstationary;
mod petc;
mod ucb;

pub use baseline::{OraclePolicy, UniformRandom};
pub use exp3::Exp3;
pub use halving::{SequentialHalving, ShStep};
pub use nonstationary::{DiscountedUcb, SlidingWindowUcb};
pub use petc::Petc;
pub use ucb::Ucb;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("selection requested before every arm was initialized")]
    InitIncomplete,
    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),
    #[error("selection probability must be positive, got {0}")]
    NonpositiveProbability(f64),
}

/// A drafter-selection policy driven by the episode loop.
pub trait Policy: Send {
    /// Number of arms.
    fn k(&self) -> usize;

    /// Arm to play in the given (1-based) round.
    fn select(&mut self, round: u64, rng: &mut ChaCha8Rng) -> usize;

    /// Observe the reward for `arm` and the tokens the round emitted.
    fn update(&mut self, arm: usize, reward: f64, tokens_emitted: u32);

    /// Return to the initial state (new query).
    fn reset(&mut self);
}

/// Index of the maximum, ties to the lowest index.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}
