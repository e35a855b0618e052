//! Canned experiment configurations.

use super::config::{BudgetSpec, ConfigError, EnvSpec, ExperimentConfig, PolicySpec};
use crate::env::{AlignmentDist, DrafterProfile, ScheduleEntry};
use crate::rewards::RewardKind;

/// Mean acceptance rates of the five-drafter pool used by the stationary
/// scenarios; index 0 is the best arm.
pub const STATIONARY_K5_MEANS: [f64; 5] = [0.488, 0.294, 0.317, 0.288, 0.326];

/// Round at which the piecewise scenario swaps the two best arms.
pub const FLIP_ROUND: u64 = 200;

/// Names accepted by [`make_scenario`].
pub const SCENARIO_NAMES: [&str; 4] = [
    "stationary_k5",
    "piecewise_flip",
    "query_stream",
    "switching_cost",
];

fn k5_dist(mean: f64) -> AlignmentDist {
    AlignmentDist::point(mean)
}

fn k5_drafters() -> Vec<DrafterProfile> {
    STATIONARY_K5_MEANS
        .iter()
        .enumerate()
        .map(|(id, &mean)| DrafterProfile::stationary(id, k5_dist(mean)))
        .collect()
}

/// The same pool with per-token alignment noise at the scale seen in
/// real reward traces (per-round reward variance a few hundredths).
pub fn noisy_k5_drafters(concentration: f64) -> Vec<DrafterProfile> {
    STATIONARY_K5_MEANS
        .iter()
        .enumerate()
        .map(|(id, &mean)| {
            DrafterProfile::stationary(
                id,
                AlignmentDist::beta(mean * concentration, (1.0 - mean) * concentration, 0.0, 1.0),
            )
        })
        .collect()
}

/// Build one of the canned configurations.
pub fn make_scenario(name: &str) -> Result<ExperimentConfig, ConfigError> {
    let base = ExperimentConfig {
        k: 5,
        n_max: 5,
        budget_b: BudgetSpec::Fixed(10_000),
        drafters: k5_drafters(),
        policy: PolicySpec::Ucb { beta: 0.01 },
        reward: RewardKind::Bd,
        env: EnvSpec::Rate,
        replications: 200,
        base_seed: 42,
        lambda_switch: 0.0,
        query_stream: None,
        shared_round_noise: false,
    };
    let cfg = match name {
        "stationary_k5" => base,
        "piecewise_flip" => {
            // Swap the distributions of the two best arms (ids 0 and 4)
            // at the flip round; shorter episodes, more replications for
            // the recovery comparison.
            let mut cfg = base;
            let best = k5_dist(STATIONARY_K5_MEANS[0]);
            let runner_up = k5_dist(STATIONARY_K5_MEANS[4]);
            cfg.drafters[0].schedule = vec![ScheduleEntry {
                change_round: FLIP_ROUND,
                dist: runner_up,
            }];
            cfg.drafters[4].schedule = vec![ScheduleEntry {
                change_round: FLIP_ROUND,
                dist: best,
            }];
            cfg.budget_b = BudgetSpec::Fixed(1500);
            cfg.replications = 300;
            cfg
        }
        "query_stream" => {
            let mut cfg = base;
            cfg.budget_b = BudgetSpec::Fixed(400);
            cfg.query_stream = Some(10);
            cfg.replications = 100;
            cfg
        }
        "switching_cost" => {
            let mut cfg = base;
            cfg.policy = PolicySpec::Petc { c: 20.0 };
            cfg.lambda_switch = 0.1;
            cfg
        }
        other => {
            return Err(ConfigError::new(
                "scenario",
                format!("unknown scenario `{other}`; expected one of {SCENARIO_NAMES:?}"),
            ));
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
