//! Closed-form statistics and regret estimators the simulator is checked
//! against.
//!
//! Everything here is analytic: moments of the accepted-draft count, the
//! two reward signals' statistics, the feedback-signal machinery that
//! compares them, stopping-time bounds for a single-drafter process, and
//! the logarithmic leading terms of the regret upper bounds. The Monte
//! Carlo side lives in [`crate::harness`] and [`crate::verify`]; this
//! module is the thing it is validated against.

use serde::Serialize;
use thiserror::Error;

use crate::env::AlignmentDist;
use crate::harness::EpisodeTrace;
use crate::rewards::RewardKind;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("value {0} must lie strictly inside (0, 1)")]
    NotInOpenUnitInterval(f64),
    #[error("traces aggregate different budgets ({0} vs {1})")]
    BudgetMismatch(u64, u64),
    #[error("policy and oracle replication counts differ ({0} vs {1})")]
    ReplicationMismatch(usize, usize),
    #[error("no traces to aggregate")]
    NoReplications,
}

/// Mean accepted-draft count per round: `(α − α^{n+1}) / (1 − α)`,
/// evaluated as the geometric partial sum `Σ_{j=1..n} α^j` so the
/// endpoints need no special casing and nothing cancels.
pub fn expected_nacc(alpha: f64, n_max: u32) -> Result<f64, AnalyticsError> {
    check_alpha(alpha)?;
    let mut sum = 0.0;
    let mut power = 1.0;
    for _ in 0..n_max {
        power *= alpha;
        sum += power;
    }
    Ok(sum)
}

/// Variance of the accepted-draft count per round:
/// `α/(1−α)² · (1 − (2n+1)α^n + (2n+1)α^{n+1} − α^{2n+1})`.
///
/// The bracket is a difference of near-equal terms as `α → 1`, so it is
/// evaluated through the equivalent all-positive factorization
/// `α(1−α) Σ_{s=1..n} α^{n−s} (Σ_{j=0..s−1} α^j)²`.
pub fn var_nacc(alpha: f64, n_max: u32) -> Result<f64, AnalyticsError> {
    check_alpha(alpha)?;
    let mut sum = 0.0;
    let mut geom = 0.0; // Σ_{j=0..s−1} α^j
    let mut power = 1.0; // α^{s−1}
    for s in 1..=n_max {
        if s > 1 {
            power *= alpha;
        }
        geom += power;
        sum += alpha.powi((n_max - s) as i32) * geom * geom;
    }
    Ok(alpha * (1.0 - alpha) * sum)
}

/// Mean and variance of the block-efficiency reward.
pub fn be_stats(alpha: f64, n_max: u32) -> Result<(f64, f64), AnalyticsError> {
    let n = f64::from(n_max);
    Ok((
        expected_nacc(alpha, n_max)? / n,
        var_nacc(alpha, n_max)? / (n * n),
    ))
}

/// Mean and a variance upper bound for the block-divergence reward under
/// the given alignment distribution.
///
/// The mean is the distribution mean; the bound is the per-draw variance
/// (capped at the universal 1/4 for `[0,1]`-valued variables) divided by
/// the draft length.
pub fn bd_stats(dist: &AlignmentDist, n_max: u32) -> (f64, f64) {
    let per_draw = dist.variance().min(0.25);
    (dist.mean(), per_draw / f64::from(n_max))
}

/// Feedback signal `Δ² / max(var_i, var_star)`.
///
/// Larger is better: suboptimal arms separate from the optimum faster.
/// Returns `+∞` when both variances vanish (noiseless rewards identify
/// the gap immediately).
pub fn feedback_signal(delta: f64, var_i: f64, var_star: f64) -> f64 {
    let denom = var_i.max(var_star);
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    delta * delta / denom
}

/// The three polynomials governing the reward-signal comparison, all
/// evaluated at `x` strictly inside `(0, 1)`:
///
/// * `mean` — the accepted-count mean `(x − x^{n+1})/(1 − x)`;
/// * `slope` — its derivative `Σ_{s=1..n} s·x^{s−1}`;
/// * `scaled_var` — `Σ_{s=1..n} s·(x^{s−1} − x^{2n−s})`, which equals
///   the accepted-count variance divided by `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalCurves {
    pub mean: f64,
    pub slope: f64,
    pub scaled_var: f64,
}

/// Evaluates [`SignalCurves`] at `x` in the open unit interval.
pub fn signal_curves(n_max: u32, x: f64) -> Result<SignalCurves, AnalyticsError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(AnalyticsError::NotInOpenUnitInterval(x));
    }
    let n = n_max as i32;
    let mean = expected_nacc(x, n_max).expect("x inside the unit interval");
    let mut slope = 0.0;
    let mut scaled_var = 0.0;
    for s in 1..=n {
        let sf = f64::from(s);
        slope += sf * x.powi(s - 1);
        scaled_var += sf * (x.powi(s - 1) - x.powi(2 * n - s));
    }
    Ok(SignalCurves {
        mean,
        slope,
        scaled_var,
    })
}

/// Whether the fine-grained (BD) reward's signal provably dominates the
/// count-based (BE) one at an optimum with rate `alpha_star`:
/// `scaled_var(α*) ≥ slope(α*)² / (4 n α*)`.
pub fn signal_dominance_condition(alpha_star: f64, n_max: u32) -> bool {
    debug_assert!(alpha_star > 0.0 && alpha_star < 1.0);
    let c = signal_curves(n_max, alpha_star).expect("alpha_star in (0, 1)");
    c.scaled_var >= c.slope * c.slope / (4.0 * f64::from(n_max) * alpha_star)
}

/// Analytic bounds on the expected number of rounds a single drafter with
/// rate `alpha` needs to emit `budget_b` tokens:
/// `(B·r − 1, (B+1)·r)` with `r = (1 − α)/(1 − α^{n+1})`.
pub fn single_arm_stopping_bounds(alpha: f64, n_max: u32, budget_b: u64) -> (f64, f64) {
    let rate = rounds_per_token(alpha, n_max);
    let b = budget_b as f64;
    (b * rate - 1.0, (b + 1.0) * rate)
}

/// Expected rounds consumed per emitted token, `(1 − α)/(1 − α^{n+1})`:
/// the reciprocal of the mean tokens per round `Σ_{j=0..n} α^j`.
pub fn rounds_per_token(alpha: f64, n_max: u32) -> f64 {
    let mut tokens_per_round = 1.0;
    let mut power = 1.0;
    for _ in 0..n_max {
        power *= alpha;
        tokens_per_round += power;
    }
    1.0 / tokens_per_round
}

/// Stopping-time regret estimate from paired policy/oracle traces.
#[derive(Debug, Clone, Serialize)]
pub struct RegretReport {
    pub policy_mean_rounds: f64,
    pub oracle_mean_rounds: f64,
    pub stopping_regret: f64,
    /// Standard error of the paired per-replication round difference.
    pub std_err: f64,
    pub replications: u32,
    /// Mean accumulated switching cost per trace, when a switching cost
    /// was configured.
    pub switching_term: Option<f64>,
}

impl RegretReport {
    /// Stopping regret plus the switching term (zero when none was
    /// configured).
    pub fn switching_regret(&self) -> f64 {
        self.stopping_regret + self.switching_term.unwrap_or(0.0)
    }
}

/// Difference of mean round counts between paired policy and oracle
/// traces, with the paired standard error.
pub fn stopping_regret(
    policy_traces: &[EpisodeTrace],
    oracle_traces: &[EpisodeTrace],
) -> Result<RegretReport, AnalyticsError> {
    if policy_traces.len() != oracle_traces.len() {
        return Err(AnalyticsError::ReplicationMismatch(
            policy_traces.len(),
            oracle_traces.len(),
        ));
    }
    if policy_traces.is_empty() {
        return Err(AnalyticsError::NoReplications);
    }
    let mut diffs = Vec::with_capacity(policy_traces.len());
    let mut policy_sum = 0.0;
    let mut oracle_sum = 0.0;
    for (p, o) in policy_traces.iter().zip(oracle_traces) {
        if p.budget != o.budget {
            return Err(AnalyticsError::BudgetMismatch(p.budget, o.budget));
        }
        let dp = p.rounds() as f64;
        let doracle = o.rounds() as f64;
        policy_sum += dp;
        oracle_sum += doracle;
        diffs.push(dp - doracle);
    }
    let n = diffs.len() as f64;
    let mean_diff = diffs.iter().sum::<f64>() / n;
    let var = if diffs.len() > 1 {
        diffs.iter().map(|d| (d - mean_diff).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(RegretReport {
        policy_mean_rounds: policy_sum / n,
        oracle_mean_rounds: oracle_sum / n,
        stopping_regret: mean_diff,
        std_err: (var / n).sqrt(),
        replications: diffs.len() as u32,
        switching_term: None,
    })
}

/// Accumulated switching cost of a trace.
///
/// A switch at round `t` (the arm differs from round `t−1`'s) costs
/// `λ · (l(t) − l(τ_i(t)))` where `l(t)` is the token count entering the
/// round and `τ_i(t)` is the incoming arm's previous round of use; an arm
/// never used before pays for the whole context built so far. The first
/// round counts as the initial switch, at zero accumulated context.
pub fn switching_cost(trace: &EpisodeTrace, lambda: f64) -> f64 {
    debug_assert!(lambda >= 0.0);
    if lambda == 0.0 {
        return 0.0;
    }
    let mut last_l: Vec<Option<u64>> = Vec::new();
    let mut total = 0.0;
    let mut prev_arm: Option<usize> = None;
    let mut l_entering = 0u64;
    for rec in &trace.records {
        if rec.arm >= last_l.len() {
            last_l.resize(rec.arm + 1, None);
        }
        if prev_arm != Some(rec.arm) {
            let resume_from = last_l[rec.arm].unwrap_or(0);
            total += lambda * (l_entering - resume_from) as f64;
        }
        last_l[rec.arm] = Some(l_entering);
        prev_arm = Some(rec.arm);
        l_entering = rec.l;
    }
    total
}

/// Logarithmic leading term of the stopping-time regret upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingTerm {
    pub value: f64,
    /// Some suboptimal arm ties the optimum; tied arms contribute zero
    /// by convention.
    pub duplicate_optimum: bool,
}

/// Leading term of the regret upper bound for the given reward design.
///
/// For BD: `Σ_{i≠i*} 8 / (n Δ(α_i)²) · ln B`. For BE:
/// `Σ_{i≠i*} (32 Var[r_{i*}] + 16) / Δ_i² · ln B` with the gaps measured
/// in BE means. Unknown additive constants are omitted.
pub fn regret_bound_leading_term(
    alphas: &[f64],
    n_max: u32,
    budget_b: u64,
    kind: RewardKind,
) -> Result<LeadingTerm, AnalyticsError> {
    for &a in alphas {
        check_alpha(a)?;
    }
    let ln_b = (budget_b as f64).ln();
    let star = alphas
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("alphas are finite"))
        .map(|(i, _)| i)
        .expect("at least one arm");
    let mut value = 0.0;
    let mut duplicate = false;
    for (i, &alpha) in alphas.iter().enumerate() {
        if i == star {
            continue;
        }
        match kind {
            RewardKind::Bd => {
                let gap = alphas[star] - alpha;
                if gap == 0.0 {
                    duplicate = true;
                    continue;
                }
                value += 8.0 / (f64::from(n_max) * gap * gap) * ln_b;
            }
            RewardKind::Be => {
                let (mean_star, var_star) = be_stats(alphas[star], n_max)?;
                let (mean_i, _) = be_stats(alpha, n_max)?;
                let gap = mean_star - mean_i;
                if gap == 0.0 {
                    duplicate = true;
                    continue;
                }
                value += (32.0 * var_star + 16.0) / (gap * gap) * ln_b;
            }
        }
    }
    Ok(LeadingTerm {
        value,
        duplicate_optimum: duplicate,
    })
}

/// Exploration-strength scaling of the leading term: `β²` for `β > ½`.
///
/// Below one half the multiplicative analysis breaks down (its constant
/// blows up), so no scaling is reported.
pub fn beta_bound_scaling(beta: f64) -> Option<f64> {
    if beta > 0.5 {
        Some(beta * beta)
    } else {
        None
    }
}

/// The fixed three-drafter instance showing that per-round reward regret
/// and stopping-time regret can order two policies oppositely.
///
/// Rates `(0.1, 0.5, 0.8)` with draft length 2; policy 1 plays arm 0 then
/// arm 2 forever, policy 2 plays arm 1 twice then arm 2 forever. All four
/// quantities are exact decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveMismatch {
    /// Per-round (BD) regret of policy 1 over the first two rounds.
    pub regret_bd_pi1: f64,
    /// Per-round (BD) regret of policy 2 over the first two rounds.
    pub regret_bd_pi2: f64,
    /// Expected accepted tokens of policy 1 over the first two rounds.
    pub expected_tokens_pi1: f64,
    /// Expected accepted tokens of policy 2 over the first two rounds.
    pub expected_tokens_pi2: f64,
    /// Policy 2 wins on per-round regret while policy 1 wins on tokens.
    pub inversion: bool,
}

/// Computes [`ObjectiveMismatch`] exactly (integer tenths internally, so
/// the f64 results equal the decimal literals bit for bit).
pub fn objective_mismatch_instance() -> ObjectiveMismatch {
    // Rates in tenths: 1, 5, 8; optimum is arm 2.
    let (a1, a2, a3) = (1i64, 5i64, 8i64);
    // Per-round regret sums gaps of means: pi1 plays arms (0, 2) so its
    // second round has zero gap; pi2 plays (1, 1).
    let regret_pi1 = (a3 - a1) as f64 / 10.0;
    let regret_pi2 = (2 * (a3 - a2)) as f64 / 10.0;
    // Expected accepted tokens with two drafts: alpha + alpha^2, in
    // hundredths.
    let acc = |a: i64| 10 * a + a * a;
    let tokens_pi1 = (acc(a1) + acc(a3)) as f64 / 100.0;
    let tokens_pi2 = (2 * acc(a2)) as f64 / 100.0;
    ObjectiveMismatch {
        regret_bd_pi1: regret_pi1,
        regret_bd_pi2: regret_pi2,
        expected_tokens_pi1: tokens_pi1,
        expected_tokens_pi2: tokens_pi2,
        inversion: regret_pi2 < regret_pi1 && tokens_pi1 > tokens_pi2,
    }
}

fn check_alpha(alpha: f64) -> Result<(), AnalyticsError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(AnalyticsError::AlphaOutOfRange(alpha))
    }
}

/// Exhaustive enumeration of the accepted-count distribution: outcome `j`
/// has probability `α^j (1−α)` for `j < n` and `α^n` for `j = n`.
///
/// This is the independent oracle the closed forms are checked against.
pub fn nacc_pmf(alpha: f64, n_max: u32) -> Vec<f64> {
    let mut pmf: Vec<f64> = (0..n_max)
        .map(|j| alpha.powi(j as i32) * (1.0 - alpha))
        .collect();
    pmf.push(alpha.powi(n_max as i32));
    pmf
}
