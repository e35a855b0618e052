//! One seeded generation episode: select, step, reward, update, repeat
//! until the token budget is consumed.

use serde::Serialize;

use super::config::{EnvSpec, ExperimentConfig, PolicySpec};
use crate::env::{self, CategoricalEnv, RoundOutcome};
use crate::policies::{
    DiscountedUcb, Exp3, OraclePolicy, Petc, Policy, SequentialHalving, SlidingWindowUcb, Ucb,
    UniformRandom,
};
use crate::rewards::RewardKind;
use crate::seeding;

/// One row of an episode trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: u64,
    pub arm: usize,
    pub n_acc: u32,
    pub be: f64,
    pub bd: f64,
    /// Cumulative tokens after this round.
    pub l: u64,
    /// Arm differs from the previous round's (true on round one).
    pub switched: bool,
    pub degenerate: bool,
}

/// Full record of one generation up to the budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeTrace {
    pub replication: u32,
    pub query: u32,
    pub budget: u64,
    pub records: Vec<RoundRecord>,
}

impl EpisodeTrace {
    /// The stopping time: rounds until the budget was consumed.
    pub fn rounds(&self) -> u64 {
        self.records.len() as u64
    }

    /// Tokens emitted over the whole episode.
    pub fn final_tokens(&self) -> u64 {
        self.records.last().map_or(0, |r| r.l)
    }

    /// Total accepted drafts over the episode.
    pub fn total_accepted(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.n_acc)).sum()
    }
}

/// The concrete environment an experiment runs against.
pub enum RuntimeEnv {
    Rate,
    Categorical(CategoricalEnv),
}

impl RuntimeEnv {
    /// Build the environment for a config. Categorical environments are
    /// constructed once per experiment from the base seed, so every
    /// replication faces the same instance.
    pub fn prepare(cfg: &ExperimentConfig) -> Result<RuntimeEnv, env::EnvError> {
        match cfg.env {
            EnvSpec::Rate => Ok(RuntimeEnv::Rate),
            EnvSpec::Categorical { vocab, temperature } => {
                let alphas: Vec<f64> = cfg.drafters.iter().map(|d| d.dist.mean()).collect();
                let mut rng = seeding::stream(&[cfg.base_seed, seeding::STREAM_ENV_BUILD]);
                let env = env::make_categorical_env(vocab, &alphas, temperature, &mut rng)?;
                Ok(RuntimeEnv::Categorical(env))
            }
        }
    }

    fn step(
        &self,
        cfg: &ExperimentConfig,
        arm: usize,
        round: u64,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> RoundOutcome {
        match self {
            RuntimeEnv::Rate => env::step_rate_env(&cfg.drafters[arm], round, cfg.n_max, rng),
            RuntimeEnv::Categorical(env) => env::step_dist_env(env, arm, cfg.n_max, rng),
        }
    }
}

/// Instantiate the configured policy.
pub fn build_policy(cfg: &ExperimentConfig) -> Box<dyn Policy> {
    let k = cfg.k;
    match cfg.policy {
        PolicySpec::Ucb { beta } => Box::new(Ucb::new(k, beta)),
        PolicySpec::Exp3 { gamma } => Box::new(Exp3::new(k, gamma)),
        PolicySpec::Sh { budget_rounds } => {
            let budget = if budget_rounds == 0 {
                // Estimated round count of one episode: the halving
                // schedule should span the generation, not the (larger)
                // token budget.
                let pool_mean = cfg.drafters.iter().map(|d| d.mean_at(1)).sum::<f64>()
                    / cfg.drafters.len() as f64;
                let rate = crate::analytics::rounds_per_token(pool_mean, cfg.n_max);
                (cfg.expected_budget() * rate).ceil() as u64
            } else {
                budget_rounds
            };
            Box::new(SequentialHalving::new(k, budget.max(1)))
        }
        PolicySpec::Petc { c } => Box::new(Petc::new(k, c, cfg.expected_budget().round() as u64)),
        PolicySpec::Ducb { gamma_d, beta } => Box::new(DiscountedUcb::new(k, gamma_d, beta)),
        PolicySpec::Swucb { tau_w, beta } => {
            Box::new(SlidingWindowUcb::new(k, tau_w.map(|w| w as usize), beta))
        }
        PolicySpec::Random => Box::new(UniformRandom::new(k)),
        PolicySpec::Oracle => Box::new(OraclePolicy::new(cfg.drafters.clone())),
    }
}

/// Run one episode with the given policy state.
///
/// Environment randomness is keyed by `(base_seed, replication, query,
/// round, arm)`, so two runs that select the same arm in the same round
/// of the same replication see identical draws regardless of what either
/// policy did elsewhere.
pub fn run_episode_with(
    cfg: &ExperimentConfig,
    env: &RuntimeEnv,
    policy: &mut dyn Policy,
    replication: u32,
    query: u32,
) -> EpisodeTrace {
    let rep = u64::from(replication);
    let q = u64::from(query);
    let budget = cfg.budget_b.draw(&mut seeding::stream(&[
        cfg.base_seed,
        rep,
        q,
        seeding::STREAM_BUDGET,
    ]));
    let mut policy_rng = seeding::stream(&[cfg.base_seed, rep, q, seeding::STREAM_POLICY]);

    let mut records = Vec::new();
    let mut tokens = 0u64;
    let mut round = 0u64;
    let mut prev_arm: Option<usize> = None;
    while tokens < budget {
        round += 1;
        let arm = policy.select(round, &mut policy_rng);
        let mut env_rng = if cfg.shared_round_noise {
            seeding::stream(&[cfg.base_seed, rep, q, seeding::STREAM_ENV, round])
        } else {
            seeding::stream(&[
                cfg.base_seed,
                rep,
                q,
                seeding::STREAM_ENV,
                round,
                arm as u64,
            ])
        };
        let outcome = env.step(cfg, arm, round, &mut env_rng);
        let reward = match cfg.reward {
            RewardKind::Be => outcome.be_reward,
            RewardKind::Bd => outcome.bd_reward,
        };
        policy.update(arm, reward, outcome.tokens_emitted);
        tokens += u64::from(outcome.tokens_emitted);
        records.push(RoundRecord {
            round,
            arm,
            n_acc: outcome.n_acc,
            be: outcome.be_reward,
            bd: outcome.bd_reward,
            l: tokens,
            switched: prev_arm != Some(arm),
            degenerate: outcome.degenerate,
        });
        prev_arm = Some(arm);
    }
    EpisodeTrace {
        replication,
        query,
        budget,
        records,
    }
}

/// Run one replication: a fresh policy, re-initialized before every
/// query of the stream. Returns the episode traces and how many times
/// the policy state was reset.
pub fn run_replication(
    cfg: &ExperimentConfig,
    env: &RuntimeEnv,
    replication: u32,
) -> (Vec<EpisodeTrace>, u32) {
    let queries = cfg.query_stream.unwrap_or(1);
    let mut policy = build_policy(cfg);
    let mut traces = Vec::with_capacity(queries as usize);
    let mut resets = 0;
    for query in 0..queries {
        policy.reset();
        resets += 1;
        traces.push(run_episode_with(
            cfg,
            env,
            policy.as_mut(),
            replication,
            query,
        ));
    }
    (traces, resets)
}

/// Convenience wrapper: one episode with a freshly built policy.
pub fn run_episode(cfg: &ExperimentConfig, env: &RuntimeEnv, replication: u32) -> EpisodeTrace {
    let mut policy = build_policy(cfg);
    run_episode_with(cfg, env, policy.as_mut(), replication, 0)
}
