//! EXP3: exponential weights with importance-weighted reward estimates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Policy, PolicyError};

// Rescale weights whenever one exceeds this, keeping probabilities
// unchanged while staying far from overflow.
const WEIGHT_CEILING: f64 = 1e100;

/// EXP3 state: positive weights and the exploration mix `gamma`.
#[derive(Debug, Clone)]
pub struct Exp3 {
    gamma: f64,
    weights: Vec<f64>,
    last_prob: f64,
}

impl Exp3 {
    pub fn new(k: usize, gamma: f64) -> Self {
        Exp3 {
            gamma,
            weights: vec![1.0; k],
            last_prob: 1.0,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Selection probabilities `(1−γ)·w_i/Σw + γ/K`.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        let k = self.weights.len() as f64;
        self.weights
            .iter()
            .map(|&w| (1.0 - self.gamma) * w / total + self.gamma / k)
            .collect()
    }

    /// Draw an arm and return it with the probability it was drawn at.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> (usize, f64) {
        let probs = self.probabilities();
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return (i, p);
            }
        }
        let last = probs.len() - 1;
        (last, probs[last])
    }

    /// Importance-weighted update: only the played arm's weight moves, by
    /// `exp(γ · (r/p) / K)`.
    pub fn observe(&mut self, arm: usize, reward: f64, prob: f64) -> Result<(), PolicyError> {
        if prob <= 0.0 {
            return Err(PolicyError::NonpositiveProbability(prob));
        }
        if !(0.0..=1.0).contains(&reward) {
            return Err(PolicyError::RewardOutOfRange(reward));
        }
        let estimate = reward / prob;
        let k = self.weights.len() as f64;
        self.weights[arm] *= (self.gamma * estimate / k).exp();
        let max = self.weights.iter().cloned().fold(0.0, f64::max);
        if max > WEIGHT_CEILING {
            for w in &mut self.weights {
                *w /= max;
            }
        }
        Ok(())
    }
}

impl Policy for Exp3 {
    fn k(&self) -> usize {
        self.weights.len()
    }

    fn select(&mut self, _round: u64, rng: &mut ChaCha8Rng) -> usize {
        let (arm, prob) = self.draw(rng);
        self.last_prob = prob;
        arm
    }

    fn update(&mut self, arm: usize, reward: f64, _tokens_emitted: u32) {
        self.observe(arm, reward, self.last_prob)
            .expect("probability recorded at selection time");
    }

    fn reset(&mut self) {
        self.weights.fill(1.0);
        self.last_prob = 1.0;
    }
}
