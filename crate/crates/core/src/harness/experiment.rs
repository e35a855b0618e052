//! Replicated experiments: paired policy/oracle runs, best-arm curves,
//! and the reward-design comparison.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ConfigError, ExperimentConfig, PolicySpec};
use super::episode::{run_replication, EpisodeTrace, RuntimeEnv};
use crate::analytics::{self, RegretReport};
use crate::policies::argmax;
use crate::rewards::RewardKind;

/// One point of the best-arm selection curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub round: u64,
    pub best_arm_ratio: f64,
    /// Episodes still running at this round (finished ones leave the
    /// denominator).
    pub active_replications: u32,
    pub se: f64,
}

/// Fraction of still-active episodes that played the true best arm, per
/// round.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct BestArmCurve {
    pub points: Vec<CurvePoint>,
}

impl BestArmCurve {
    /// First round from which the ratio stays at or above `threshold`
    /// for the rest of the curve.
    ///
    /// The sustained form avoids crediting the forced initialization
    /// sweep, whose first round always plays arm 0.
    pub fn rounds_to_ratio(&self, threshold: f64) -> Option<u64> {
        let mut crossing = None;
        for p in self.points.iter().rev() {
            if p.best_arm_ratio >= threshold {
                crossing = Some(p.round);
            } else {
                break;
            }
        }
        crossing
    }

    /// Ratio at a specific round, if any episode was still active there.
    pub fn ratio_at(&self, round: u64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.round == round)
            .map(|p| p.best_arm_ratio)
    }
}

/// Best-arm curve over a set of episode traces. The best arm at round
/// `t` is the schedule-aware argmax of the true means.
pub fn best_arm_curve(traces: &[EpisodeTrace], cfg: &ExperimentConfig) -> BestArmCurve {
    let max_rounds = traces.iter().map(EpisodeTrace::rounds).max().unwrap_or(0);
    let mut points = Vec::with_capacity(max_rounds as usize);
    for t in 1..=max_rounds {
        let idx = (t - 1) as usize;
        let best = argmax(cfg.drafters.iter().map(|d| d.mean_at(t)));
        let mut active = 0u32;
        let mut hits = 0u32;
        for trace in traces {
            if let Some(rec) = trace.records.get(idx) {
                active += 1;
                if rec.arm == best {
                    hits += 1;
                }
            }
        }
        let ratio = f64::from(hits) / f64::from(active);
        let se = (ratio * (1.0 - ratio) / f64::from(active)).sqrt();
        points.push(CurvePoint {
            round: t,
            best_arm_ratio: ratio,
            active_replications: active,
            se,
        });
    }
    BestArmCurve { points }
}

/// Everything an experiment produces.
pub struct ExperimentResult {
    pub report: RegretReport,
    pub curve: BestArmCurve,
    pub policy_traces: Vec<EpisodeTrace>,
    pub oracle_traces: Vec<EpisodeTrace>,
    /// Policy re-initializations per replication (query streams).
    pub resets_per_replication: u32,
    /// Mean accepted drafts per round across policy traces.
    pub mean_nacc_per_round: f64,
}

/// Run the configured policy with a paired oracle run per replication.
///
/// Replications execute in parallel; every stream is keyed by the
/// replication index, so the result is identical for any worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, ConfigError> {
    cfg.validate()?;
    let env = RuntimeEnv::prepare(cfg).map_err(|e| ConfigError::new("env", e.to_string()))?;
    let mut oracle_cfg = cfg.clone();
    oracle_cfg.policy = PolicySpec::Oracle;

    let pairs: Vec<(Vec<EpisodeTrace>, u32, Vec<EpisodeTrace>)> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let (policy_traces, resets) = run_replication(cfg, &env, rep);
            let (oracle_traces, _) = run_replication(&oracle_cfg, &env, rep);
            (policy_traces, resets, oracle_traces)
        })
        .collect();

    let mut policy_traces = Vec::new();
    let mut oracle_traces = Vec::new();
    let mut resets_per_replication = 0;
    for (p, resets, o) in pairs {
        policy_traces.extend(p);
        oracle_traces.extend(o);
        resets_per_replication = resets;
    }

    let mut report = analytics::stopping_regret(&policy_traces, &oracle_traces)
        .map_err(|e| ConfigError::new("replications", e.to_string()))?;
    if cfg.lambda_switch > 0.0 {
        let total: f64 = policy_traces
            .iter()
            .map(|t| analytics::switching_cost(t, cfg.lambda_switch))
            .sum();
        report.switching_term = Some(total / policy_traces.len() as f64);
    }

    let curve = best_arm_curve(&policy_traces, cfg);
    let total_rounds: u64 = policy_traces.iter().map(EpisodeTrace::rounds).sum();
    let total_acc: u64 = policy_traces.iter().map(EpisodeTrace::total_accepted).sum();
    let mean_nacc_per_round = total_acc as f64 / total_rounds as f64;

    Ok(ExperimentResult {
        report,
        curve,
        policy_traces,
        oracle_traces,
        resets_per_replication,
        mean_nacc_per_round,
    })
}

/// Paired comparison of the two reward designs under UCB.
#[derive(Debug, Clone, Serialize)]
pub struct RewardComparison {
    pub bd_curve: BestArmCurve,
    pub be_curve: BestArmCurve,
    /// Per seed group: first round at which the group's curve reached
    /// the 0.9 best-arm ratio (`None` when it never did).
    pub bd_group_rounds_to_09: Vec<Option<u64>>,
    pub be_group_rounds_to_09: Vec<Option<u64>>,
    /// Median over groups.
    pub bd_median_rounds_to_09: Option<u64>,
    pub be_median_rounds_to_09: Option<u64>,
    /// Fraction of groups where BD reached 0.9 no later than BE.
    pub bd_no_later_fraction: f64,
}

/// Size of one seed group when medianizing rounds-to-threshold.
pub const COMPARE_GROUP_SIZE: usize = 20;

/// Run UCB with the BD reward and with the BE reward on paired seeds and
/// compare convergence.
pub fn compare_rewards(cfg: &ExperimentConfig) -> Result<RewardComparison, ConfigError> {
    let mut bd_cfg = cfg.clone();
    bd_cfg.reward = RewardKind::Bd;
    let mut be_cfg = cfg.clone();
    be_cfg.reward = RewardKind::Be;
    bd_cfg.validate()?;
    let env = RuntimeEnv::prepare(cfg).map_err(|e| ConfigError::new("env", e.to_string()))?;

    let run = |cfg: &ExperimentConfig| -> Vec<EpisodeTrace> {
        (0..cfg.replications)
            .into_par_iter()
            .flat_map_iter(|rep| run_replication(cfg, &env, rep).0)
            .collect()
    };
    let bd_traces = run(&bd_cfg);
    let be_traces = run(&be_cfg);

    let group_rounds = |traces: &[EpisodeTrace], cfg: &ExperimentConfig| -> Vec<Option<u64>> {
        traces
            .chunks(COMPARE_GROUP_SIZE)
            .filter(|chunk| chunk.len() == COMPARE_GROUP_SIZE)
            .map(|chunk| best_arm_curve(chunk, cfg).rounds_to_ratio(0.9))
            .collect()
    };
    let bd_groups = group_rounds(&bd_traces, &bd_cfg);
    let be_groups = group_rounds(&be_traces, &be_cfg);

    let no_later = bd_groups
        .iter()
        .zip(&be_groups)
        .filter(|(bd, be)| match (bd, be) {
            (Some(b), Some(e)) => b <= e,
            (Some(_), None) => true,
            (None, _) => false,
        })
        .count() as f64
        / bd_groups.len().max(1) as f64;

    Ok(RewardComparison {
        bd_curve: best_arm_curve(&bd_traces, &bd_cfg),
        be_curve: best_arm_curve(&be_traces, &be_cfg),
        bd_median_rounds_to_09: median_rounds(&bd_groups),
        be_median_rounds_to_09: median_rounds(&be_groups),
        bd_group_rounds_to_09: bd_groups,
        be_group_rounds_to_09: be_groups,
        bd_no_later_fraction: no_later,
    })
}

/// Median of the per-group thresholds; groups that never reached the
/// threshold count as slower than every group that did.
fn median_rounds(groups: &[Option<u64>]) -> Option<u64> {
    if groups.is_empty() {
        return None;
    }
    let mut sorted: Vec<Option<u64>> = groups.to_vec();
    sorted.sort_by_key(|g| g.unwrap_or(u64::MAX));
    sorted[sorted.len() / 2]
}
