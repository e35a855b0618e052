//! UCB variants that forget: geometric discounting and a sliding window.
//!
//! Both reuse the UCB index with effective (discounted or windowed)
//! statistics. An arm whose effective count has reached zero gets an
//! infinite index, mirroring the forced initialization of plain UCB;
//! this is what lets the variants rediscover an arm whose distribution
//! changed after they stopped playing it.

use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;

use super::{argmax, Policy};

/// UCB over geometrically discounted reward sums and counts.
#[derive(Debug, Clone)]
pub struct DiscountedUcb {
    beta: f64,
    discount: f64,
    sums: Vec<f64>,
    effective_counts: Vec<f64>,
    round: u64,
}

impl DiscountedUcb {
    /// `discount` in `(0, 1]`; at exactly 1 the policy coincides with
    /// plain UCB.
    pub fn new(k: usize, discount: f64, beta: f64) -> Self {
        DiscountedUcb {
            beta,
            discount,
            sums: vec![0.0; k],
            effective_counts: vec![0.0; k],
            round: 0,
        }
    }

    pub fn effective_counts(&self) -> &[f64] {
        &self.effective_counts
    }

    fn index(&self, arm: usize) -> f64 {
        let n = self.effective_counts[arm];
        if n == 0.0 {
            return f64::INFINITY;
        }
        let ln_t = (self.round as f64).max(1.0).ln();
        self.sums[arm] / n + self.beta * (2.0 * ln_t / n).sqrt()
    }
}

impl Policy for DiscountedUcb {
    fn k(&self) -> usize {
        self.sums.len()
    }

    fn select(&mut self, _round: u64, _rng: &mut ChaCha8Rng) -> usize {
        if let Some(arm) = self.effective_counts.iter().position(|&n| n == 0.0) {
            return arm;
        }
        argmax((0..self.sums.len()).map(|arm| self.index(arm)))
    }

    fn update(&mut self, arm: usize, reward: f64, _tokens_emitted: u32) {
        for (s, n) in self.sums.iter_mut().zip(&mut self.effective_counts) {
            *s *= self.discount;
            *n *= self.discount;
        }
        self.sums[arm] += reward;
        self.effective_counts[arm] += 1.0;
        self.round += 1;
    }

    fn reset(&mut self) {
        self.sums.fill(0.0);
        self.effective_counts.fill(0.0);
        self.round = 0;
    }
}

/// UCB over only the last `window` rounds.
///
/// `window = None` means unbounded history, which coincides with plain
/// UCB exactly.
#[derive(Debug, Clone)]
pub struct SlidingWindowUcb {
    beta: f64,
    window: Option<usize>,
    k: usize,
    history: VecDeque<(usize, f64)>,
    round: u64,
}

impl SlidingWindowUcb {
    pub fn new(k: usize, window: Option<usize>, beta: f64) -> Self {
        SlidingWindowUcb {
            beta,
            window,
            k,
            history: VecDeque::new(),
            round: 0,
        }
    }

    /// Per-arm (count, reward sum) over the window.
    fn window_stats(&self) -> (Vec<u64>, Vec<f64>) {
        let mut counts = vec![0u64; self.k];
        let mut sums = vec![0.0; self.k];
        for &(arm, reward) in &self.history {
            counts[arm] += 1;
            sums[arm] += reward;
        }
        (counts, sums)
    }
}

impl Policy for SlidingWindowUcb {
    fn k(&self) -> usize {
        self.k
    }

    fn select(&mut self, _round: u64, _rng: &mut ChaCha8Rng) -> usize {
        let (counts, sums) = self.window_stats();
        if let Some(arm) = counts.iter().position(|&n| n == 0) {
            return arm;
        }
        let ln_t = (self.round as f64).max(1.0).ln();
        argmax((0..self.k).map(|arm| {
            let n = counts[arm] as f64;
            sums[arm] / n + self.beta * (2.0 * ln_t / n).sqrt()
        }))
    }

    fn update(&mut self, arm: usize, reward: f64, _tokens_emitted: u32) {
        self.history.push_back((arm, reward));
        if let Some(w) = self.window {
            while self.history.len() > w {
                self.history.pop_front();
            }
        }
        self.round += 1;
    }

    fn reset(&mut self) {
        self.history.clear();
        self.round = 0;
    }
}
