//! Pure exploration-then-commit.
//!
//! Phase one runs a sequential-halving schedule while the cumulative
//! emitted-token count is below the exploration budget `B₀ = ⌈c·ln B⌉`;
//! at the boundary the policy commits permanently to the halving run's
//! best arm. Bounding the exploration phase in tokens bounds every
//! switch the policy will ever make.

use rand_chacha::ChaCha8Rng;

use super::{Policy, SequentialHalving};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Explore,
    Commit(usize),
}

#[derive(Debug, Clone)]
pub struct Petc {
    k: usize,
    c: f64,
    budget_b: u64,
    explore_tokens: u64,
    inner: SequentialHalving,
    tokens: u64,
    phase: Phase,
}

impl Petc {
    /// Exploration constant `c` scales the token budget `⌈c·ln B⌉` of
    /// phase one.
    pub fn new(k: usize, c: f64, budget_b: u64) -> Self {
        let explore_tokens = explore_budget(c, budget_b);
        let phase = if k == 1 {
            Phase::Commit(0)
        } else {
            Phase::Explore
        };
        Petc {
            k,
            c,
            budget_b,
            explore_tokens,
            // The halving schedule's pull budget: rounds never outnumber
            // tokens, so the token budget bounds the rounds of phase one.
            inner: SequentialHalving::new(k, explore_tokens.max(1)),
            tokens: 0,
            phase,
        }
    }

    /// Token budget of the exploration phase.
    pub fn explore_tokens(&self) -> u64 {
        self.explore_tokens
    }

    /// The arm committed to, once phase one has ended.
    pub fn committed_arm(&self) -> Option<usize> {
        match self.phase {
            Phase::Commit(arm) => Some(arm),
            Phase::Explore => None,
        }
    }
}

/// `⌈c · ln B⌉`, at least one token.
pub fn explore_budget(c: f64, budget_b: u64) -> u64 {
    ((c * (budget_b as f64).ln()).ceil() as u64).max(1)
}

impl Policy for Petc {
    fn k(&self) -> usize {
        self.k
    }

    fn select(&mut self, _round: u64, _rng: &mut ChaCha8Rng) -> usize {
        match self.phase {
            Phase::Commit(arm) => arm,
            Phase::Explore => self.inner.current_arm(),
        }
    }

    fn update(&mut self, _arm: usize, reward: f64, tokens_emitted: u32) {
        if let Phase::Explore = self.phase {
            self.inner.observe(reward);
            self.tokens += u64::from(tokens_emitted);
            if self.tokens >= self.explore_tokens {
                self.phase = Phase::Commit(self.inner.leader());
            }
        }
    }

    fn reset(&mut self) {
        *self = Petc::new(self.k, self.c, self.budget_b);
    }
}
