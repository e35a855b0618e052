//! Reward signals computed from one round of speculative decoding.
//!
//! Two signals are supported. The block-efficiency (BE) reward is the
//! accepted-draft count divided by the draft length: coarse, supported on
//! the lattice `{0, 1/n, ..., 1}`, and zero whenever the first draft is
//! rejected. The block-divergence (BD) reward is the mean, over all draft
//! positions, of one minus the total variation distance between the target
//! and drafter next-token distributions: continuous, never zero for a
//! drafter with any alignment, and with variance at most `1/(4 n)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which reward signal a policy run observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    /// Block efficiency: accepted drafts over draft length.
    Be,
    /// Block divergence: mean per-position alignment.
    #[default]
    Bd,
}

#[derive(Debug, Error, PartialEq)]
pub enum RewardError {
    #[error("distribution length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("vector is not a probability distribution (sum {0})")]
    NotNormalized(f64),
    #[error("expected {expected} per-position values, got {got}")]
    WrongPositionCount { expected: usize, got: usize },
    #[error("accepted count {n_acc} exceeds draft length {n_max}")]
    AcceptedOutOfRange { n_acc: u32, n_max: u32 },
}

const NORMALIZATION_TOL: f64 = 1e-9;

/// Total variation distance `½ Σ |p_k − q_k|` between two distributions.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64, RewardError> {
    if p.len() != q.len() {
        return Err(RewardError::LengthMismatch(p.len(), q.len()));
    }
    for v in [p, q] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL || v.iter().any(|&x| x < 0.0) {
            return Err(RewardError::NotNormalized(sum));
        }
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0)
}

/// BD reward from the per-position TV distances of one round.
///
/// All `n_max` positions contribute, including those after the first
/// rejection: the verifier scores the whole drafted block in parallel, so
/// every position has a distance.
pub fn bd_reward(tv_per_position: &[f64], n_max: usize) -> Result<f64, RewardError> {
    if tv_per_position.len() != n_max {
        return Err(RewardError::WrongPositionCount {
            expected: n_max,
            got: tv_per_position.len(),
        });
    }
    Ok(tv_per_position.iter().map(|tv| 1.0 - tv).sum::<f64>() / n_max as f64)
}

/// BE reward: `n_acc / n_max`.
pub fn be_reward(n_acc: u32, n_max: u32) -> Result<f64, RewardError> {
    if n_acc > n_max {
        return Err(RewardError::AcceptedOutOfRange { n_acc, n_max });
    }
    Ok(f64::from(n_acc) / f64::from(n_max))
}
