//! Declarative experiment description and its validation.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::DrafterProfile;
use crate::rewards::RewardKind;

/// A configuration field failed validation. The field path is part of the
/// message contract: front ends surface it verbatim.
#[derive(Debug, Error, PartialEq)]
#[error("config field `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Target token budget: fixed, or geometric-with-offset so the budget
/// itself can be a random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetSpec {
    Fixed(u64),
    Geometric { offset: u64, success_prob: f64 },
}

impl BudgetSpec {
    /// Draw a budget; fixed budgets consume no randomness.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> u64 {
        match *self {
            BudgetSpec::Fixed(b) => b,
            BudgetSpec::Geometric {
                offset,
                success_prob,
            } => {
                // Failures before the first success, by inversion.
                let u: f64 = rng.gen();
                let extra = ((1.0 - u).ln() / (1.0 - success_prob).ln()).floor() as u64;
                (offset + extra).max(1)
            }
        }
    }

    /// Mean of the budget distribution.
    pub fn expected(&self) -> f64 {
        match *self {
            BudgetSpec::Fixed(b) => b as f64,
            BudgetSpec::Geometric {
                offset,
                success_prob,
            } => offset as f64 + (1.0 - success_prob) / success_prob,
        }
    }
}

/// Which selection policy to run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PolicySpec {
    Ucb {
        #[serde(default = "default_beta")]
        beta: f64,
    },
    Exp3 {
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
    /// Sequential halving with a pull budget in rounds; 0 sizes the
    /// budget to the episode's estimated round count.
    Sh {
        #[serde(default)]
        budget_rounds: u64,
    },
    Petc {
        #[serde(default = "default_petc_c")]
        c: f64,
    },
    Ducb {
        #[serde(default = "default_ducb_discount")]
        gamma_d: f64,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    Swucb {
        tau_w: Option<u64>,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    Random,
    Oracle,
}

fn default_beta() -> f64 {
    0.01
}

fn default_gamma() -> f64 {
    0.4
}

fn default_petc_c() -> f64 {
    20.0
}

fn default_ducb_discount() -> f64 {
    0.95
}

fn default_n_max() -> u32 {
    5
}

fn default_replications() -> u32 {
    200
}

fn default_base_seed() -> u64 {
    42
}

/// Which environment realizes the drafters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnvSpec {
    /// Acceptance rates drawn per token from each drafter's alignment
    /// distribution.
    #[default]
    Rate,
    /// Explicit categorical next-token distributions with the exact
    /// accept/residual rule.
    Categorical {
        vocab: usize,
        #[serde(default = "default_temperature")]
        temperature: f64,
    },
}

fn default_temperature() -> f64 {
    1.0
}

/// Everything needed to reproduce a simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    pub budget_b: BudgetSpec,
    pub drafters: Vec<DrafterProfile>,
    pub policy: PolicySpec,
    #[serde(default)]
    pub reward: RewardKind,
    #[serde(default)]
    pub env: EnvSpec,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default)]
    pub lambda_switch: f64,
    /// Number of queries per replication; the policy is re-initialized
    /// for every query. Absent means a single query.
    #[serde(default)]
    pub query_stream: Option<u32>,
    /// Couple the environment draws of a round across drafters (one
    /// shared stream per round) instead of giving each (round, drafter)
    /// pair its own stream.
    #[serde(default)]
    pub shared_round_noise: bool,
}

impl ExperimentConfig {
    /// Mean token budget (the budget itself when fixed).
    pub fn expected_budget(&self) -> f64 {
        self.budget_b.expected()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k < 1 {
            return Err(ConfigError::new("k", "need at least one drafter"));
        }
        if self.n_max < 1 {
            return Err(ConfigError::new("n_max", "draft length must be at least 1"));
        }
        if self.drafters.len() != self.k {
            return Err(ConfigError::new(
                "drafters",
                format!("expected {} profiles, got {}", self.k, self.drafters.len()),
            ));
        }
        for (i, d) in self.drafters.iter().enumerate() {
            let field = format!("drafters[{i}]");
            d.validate(&field)
                .map_err(|e| ConfigError::new(field.clone(), e.to_string()))?;
            if self
                .drafters
                .iter()
                .filter(|other| other.id == d.id)
                .count()
                > 1
            {
                return Err(ConfigError::new(
                    format!("{field}.id"),
                    format!("duplicate drafter id {}", d.id),
                ));
            }
        }
        match self.budget_b {
            BudgetSpec::Fixed(b) if b < 1 => {
                return Err(ConfigError::new("budget_b", "budget must be at least 1"));
            }
            BudgetSpec::Geometric { success_prob, .. }
                if !(success_prob > 0.0 && success_prob < 1.0) =>
            {
                return Err(ConfigError::new(
                    "budget_b.success_prob",
                    "must lie strictly inside (0, 1)",
                ));
            }
            _ => {}
        }
        match self.policy {
            PolicySpec::Ucb { beta }
            | PolicySpec::Ducb { beta, .. }
            | PolicySpec::Swucb { beta, .. }
                if beta < 0.0 =>
            {
                return Err(ConfigError::new("policy.beta", "must be nonnegative"));
            }
            PolicySpec::Exp3 { gamma } if !(gamma > 0.0 && gamma <= 1.0) => {
                return Err(ConfigError::new("policy.gamma", "must lie in (0, 1]"));
            }
            PolicySpec::Petc { c } if c <= 0.0 => {
                return Err(ConfigError::new("policy.c", "must be positive"));
            }
            _ => {}
        }
        if let PolicySpec::Ducb { gamma_d, .. } = self.policy {
            if !(gamma_d > 0.0 && gamma_d <= 1.0) {
                return Err(ConfigError::new("policy.gamma_d", "must lie in (0, 1]"));
            }
        }
        if let PolicySpec::Swucb { tau_w: Some(w), .. } = self.policy {
            if w < self.k as u64 {
                return Err(ConfigError::new(
                    "policy.tau_w",
                    format!("window must cover all {} arms", self.k),
                ));
            }
        }
        if let EnvSpec::Categorical { vocab, temperature } = self.env {
            if vocab < 4 {
                return Err(ConfigError::new("env.vocab", "need at least 4 symbols"));
            }
            if temperature < 0.0 {
                return Err(ConfigError::new("env.temperature", "must be nonnegative"));
            }
            if self.drafters.iter().any(|d| !d.schedule.is_empty()) {
                return Err(ConfigError::new(
                    "drafters.schedule",
                    "categorical environments support stationary drafters only",
                ));
            }
        }
        if self.replications < 1 {
            return Err(ConfigError::new(
                "replications",
                "need at least one replication",
            ));
        }
        if self.lambda_switch < 0.0 {
            return Err(ConfigError::new("lambda_switch", "must be nonnegative"));
        }
        if let Some(q) = self.query_stream {
            if q < 1 {
                return Err(ConfigError::new("query_stream", "need at least one query"));
            }
        }
        Ok(())
    }
}
