//! Sequential halving: fixed-budget best-arm identification.
//!
//! The pull budget is spread over `⌈log₂ K⌉` elimination stages. Within a
//! stage every surviving arm is pulled the same number of times
//! (round-robin sweeps), then the worse half by accumulated stage reward
//! is dropped. Once a single arm survives, the policy keeps playing it.

use rand_chacha::ChaCha8Rng;

use super::Policy;

/// What the schedule did after recording an observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShStep {
    /// Still inside a stage; this arm is the next pull.
    Pull(usize),
    /// A stage boundary was crossed; these arms survived.
    Advanced { stage: u32, survivors: Vec<usize> },
    /// Halving is complete; this arm is the survivor.
    Final(usize),
}

#[derive(Debug, Clone)]
pub struct SequentialHalving {
    budget: u64,
    stages: u32,
    surviving: Vec<usize>,
    stage: u32,
    pulls_per_arm: u64,
    pulls_this_stage: u64,
    stage_rewards: Vec<f64>,
    total_rewards: Vec<f64>,
    total_counts: Vec<u64>,
}

fn ceil_log2(k: usize) -> u32 {
    if k <= 1 {
        0
    } else {
        k.next_power_of_two().trailing_zeros()
    }
}

impl SequentialHalving {
    /// A halving schedule over `k` arms with a total pull budget of
    /// `budget` rounds.
    pub fn new(k: usize, budget: u64) -> Self {
        assert!(k >= 1, "need at least one arm");
        let mut sh = SequentialHalving {
            budget,
            stages: ceil_log2(k),
            surviving: (0..k).collect(),
            stage: 0,
            pulls_per_arm: 0,
            pulls_this_stage: 0,
            stage_rewards: vec![0.0; k],
            total_rewards: vec![0.0; k],
            total_counts: vec![0; k],
        };
        sh.pulls_per_arm = sh.stage_quota();
        sh
    }

    /// Pulls per surviving arm this stage: `⌊T / (|S| · ⌈log₂ K⌉)⌋`,
    /// degraded to at least one when the budget is too small.
    fn stage_quota(&self) -> u64 {
        if self.surviving.len() <= 1 {
            return 0;
        }
        (self.budget / (self.surviving.len() as u64 * u64::from(self.stages))).max(1)
    }

    /// Whether a single arm remains.
    pub fn is_complete(&self) -> bool {
        self.surviving.len() == 1
    }

    /// The surviving set, ascending by id.
    pub fn surviving(&self) -> &[usize] {
        &self.surviving
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn pulls_per_arm(&self) -> u64 {
        self.pulls_per_arm
    }

    /// The arm scheduled for the next pull (the survivor once complete).
    pub fn current_arm(&self) -> usize {
        if self.is_complete() {
            return self.surviving[0];
        }
        let idx = (self.pulls_this_stage % self.surviving.len() as u64) as usize;
        self.surviving[idx]
    }

    /// Mean reward of `arm` over every pull so far, if it was ever pulled.
    pub fn overall_mean(&self, arm: usize) -> Option<f64> {
        if self.total_counts[arm] == 0 {
            None
        } else {
            Some(self.total_rewards[arm] / self.total_counts[arm] as f64)
        }
    }

    /// Best arm by overall mean within the surviving set, ties to the
    /// lowest id. Falls back to the lowest surviving id when nothing has
    /// been pulled yet.
    pub fn leader(&self) -> usize {
        let mut best = self.surviving[0];
        let mut best_mean = f64::NEG_INFINITY;
        for &arm in &self.surviving {
            if let Some(mean) = self.overall_mean(arm) {
                if mean > best_mean {
                    best = arm;
                    best_mean = mean;
                }
            }
        }
        best
    }

    /// Record the reward of the pull scheduled by [`current_arm`] and
    /// advance the schedule.
    ///
    /// [`current_arm`]: SequentialHalving::current_arm
    pub fn observe(&mut self, reward: f64) -> ShStep {
        let arm = self.current_arm();
        self.total_rewards[arm] += reward;
        self.total_counts[arm] += 1;
        if self.is_complete() {
            return ShStep::Final(arm);
        }
        self.stage_rewards[arm] += reward;
        self.pulls_this_stage += 1;
        if self.pulls_this_stage < self.pulls_per_arm * self.surviving.len() as u64 {
            return ShStep::Pull(self.current_arm());
        }
        self.advance_stage();
        if self.is_complete() {
            ShStep::Final(self.surviving[0])
        } else {
            ShStep::Advanced {
                stage: self.stage,
                survivors: self.surviving.clone(),
            }
        }
    }

    fn advance_stage(&mut self) {
        let keep = self.surviving.len().div_ceil(2);
        // Top half by stage reward; equal rewards keep the lower id.
        let mut ranked = self.surviving.clone();
        ranked.sort_by(|&a, &b| {
            self.stage_rewards[b]
                .partial_cmp(&self.stage_rewards[a])
                .expect("rewards are finite")
                .then(a.cmp(&b))
        });
        ranked.truncate(keep);
        ranked.sort_unstable();
        self.surviving = ranked;
        self.stage += 1;
        self.pulls_this_stage = 0;
        self.stage_rewards.fill(0.0);
        self.pulls_per_arm = self.stage_quota();
    }
}

impl Policy for SequentialHalving {
    fn k(&self) -> usize {
        self.total_counts.len()
    }

    fn select(&mut self, _round: u64, _rng: &mut ChaCha8Rng) -> usize {
        self.current_arm()
    }

    fn update(&mut self, arm: usize, reward: f64, _tokens_emitted: u32) {
        debug_assert_eq!(arm, self.current_arm());
        self.observe(reward);
    }

    fn reset(&mut self) {
        *self = SequentialHalving::new(self.total_counts.len(), self.budget);
    }
}
