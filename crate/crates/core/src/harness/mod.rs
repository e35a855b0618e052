//! Experiment orchestration: configuration, seeded replicated episodes,
//! aggregation, and serialization.

mod config;
mod episode;
mod experiment;
mod output;
mod scenario;

pub use config::{BudgetSpec, ConfigError, EnvSpec, ExperimentConfig, PolicySpec};
pub use episode::{
    build_policy, run_episode, run_episode_with, run_replication, EpisodeTrace, RoundRecord,
    RuntimeEnv,
};
pub use experiment::{
    best_arm_curve, compare_rewards, run_experiment, BestArmCurve, CurvePoint, ExperimentResult,
    RewardComparison, COMPARE_GROUP_SIZE,
};
pub use output::{curve_csv, curve_svg, write_results, OutputError, WriteOptions};
pub use scenario::{
    make_scenario, noisy_k5_drafters, FLIP_ROUND, SCENARIO_NAMES, STATIONARY_K5_MEANS,
};
