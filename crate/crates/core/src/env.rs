//! Speculative-decoding environments.
//!
//! Two levels of fidelity:
//!
//! * the **rate-level** environment draws a per-token acceptance
//!   probability for each draft position from the drafter's alignment
//!   distribution and accepts a prefix by coin flips, realizing the
//!   i.i.d. acceptance-rate model directly;
//! * the **distribution-level** environment holds explicit categorical
//!   next-token distributions for the target and every drafter and runs
//!   the exact speculative-sampling accept/residual rule, so losslessness
//!   can be checked against it.
//!
//! In both, one round drafts `n_max` tokens, accepts a prefix of length
//! `n_acc`, and always emits `n_acc + 1` tokens (the correction on a
//! rejection, or the bonus token when every draft is accepted).

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewards;

/// Alignment distribution of a drafter: the law of the per-token
/// acceptance rate `alpha` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentDist {
    /// Constant acceptance rate.
    PointMass { alpha: f64 },
    /// A Beta(a, b) variable rescaled to `[lo, hi]`.
    BetaScaled { a: f64, b: f64, lo: f64, hi: f64 },
}

impl AlignmentDist {
    /// Point mass at `alpha`.
    pub fn point(alpha: f64) -> Self {
        AlignmentDist::PointMass { alpha }
    }

    /// Beta(a, b) stretched over `[lo, hi]`.
    pub fn beta(a: f64, b: f64, lo: f64, hi: f64) -> Self {
        AlignmentDist::BetaScaled { a, b, lo, hi }
    }

    /// Mean acceptance rate.
    pub fn mean(&self) -> f64 {
        match *self {
            AlignmentDist::PointMass { alpha } => alpha,
            AlignmentDist::BetaScaled { a, b, lo, hi } => lo + (hi - lo) * a / (a + b),
        }
    }

    /// Variance of a single draw.
    pub fn variance(&self) -> f64 {
        match *self {
            AlignmentDist::PointMass { .. } => 0.0,
            AlignmentDist::BetaScaled { a, b, lo, hi } => {
                let s = a + b;
                (hi - lo).powi(2) * a * b / (s * s * (s + 1.0))
            }
        }
    }

    /// One draw from the distribution. Point masses consume no randomness.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            AlignmentDist::PointMass { alpha } => alpha,
            AlignmentDist::BetaScaled { a, b, lo, hi } => {
                let beta = Beta::new(a, b).expect("validated shape parameters");
                lo + (hi - lo) * beta.sample(rng)
            }
        }
    }

    pub(crate) fn validate(&self, field: &str) -> Result<(), EnvError> {
        let bad = |reason: String| EnvError::InvalidDistribution {
            field: field.to_string(),
            reason,
        };
        match *self {
            AlignmentDist::PointMass { alpha } => {
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(bad(format!("alpha {alpha} outside [0, 1]")));
                }
            }
            AlignmentDist::BetaScaled { a, b, lo, hi } => {
                if !(a > 0.0 && b > 0.0) {
                    return Err(bad(format!("shape parameters ({a}, {b}) must be positive")));
                }
                if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                    return Err(bad(format!("support [{lo}, {hi}] must sit inside [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

/// A change point in a piecewise-stationary drafter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    /// First round (1-based) at which `dist` becomes active.
    pub change_round: u64,
    pub dist: AlignmentDist,
}

/// One synthetic drafter in the pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrafterProfile {
    pub id: usize,
    pub dist: AlignmentDist,
    /// Change points in strictly increasing round order; empty means
    /// stationary.
    #[serde(default)]
    pub schedule: Vec<ScheduleEntry>,
}

impl DrafterProfile {
    pub fn stationary(id: usize, dist: AlignmentDist) -> Self {
        DrafterProfile {
            id,
            dist,
            schedule: Vec::new(),
        }
    }

    /// The distribution governing the given (1-based) round.
    pub fn active_dist(&self, round: u64) -> &AlignmentDist {
        let mut active = &self.dist;
        for entry in &self.schedule {
            if entry.change_round <= round {
                active = &entry.dist;
            } else {
                break;
            }
        }
        active
    }

    /// Mean acceptance rate at the given round.
    pub fn mean_at(&self, round: u64) -> f64 {
        self.active_dist(round).mean()
    }

    pub(crate) fn validate(&self, field: &str) -> Result<(), EnvError> {
        self.dist.validate(field)?;
        let mut prev = None;
        for (j, entry) in self.schedule.iter().enumerate() {
            entry
                .dist
                .validate(&format!("{field}.schedule[{j}].dist"))?;
            if let Some(p) = prev {
                if entry.change_round <= p {
                    return Err(EnvError::InvalidDistribution {
                        field: format!("{field}.schedule[{j}].change_round"),
                        reason: "change rounds must be strictly increasing".to_string(),
                    });
                }
            }
            prev = Some(entry.change_round);
        }
        Ok(())
    }
}

/// The observable result of one speculative-decoding round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    /// Consecutively accepted drafts, in `0..=n_max`.
    pub n_acc: u32,
    /// Block-divergence reward.
    pub bd_reward: f64,
    /// Block-efficiency reward.
    pub be_reward: f64,
    /// Always `n_acc + 1`.
    pub tokens_emitted: u32,
    /// Per-position alignment values `1 − d_TV` (the drawn acceptance
    /// rates in the rate-level environment).
    pub alphas_drawn: Vec<f64>,
    /// Set by the harness when the arm changed relative to the previous
    /// round.
    pub switched: bool,
    /// The drafter matched the target exactly at some rejected position,
    /// leaving an empty residual (distribution-level environment only).
    pub degenerate: bool,
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("{field}: {reason}")]
    InvalidDistribution { field: String, reason: String },
    #[error("vocab_size {0} too small; need at least 4 for disjoint noise support")]
    VocabTooSmall(usize),
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("temperature {0} must be nonnegative")]
    NegativeTemperature(f64),
}

/// One rate-level round: draw `n_max` acceptance rates from the profile's
/// active distribution, accept a prefix by independent coin flips.
///
/// `n_max >= 1` is enforced at configuration time, not here.
pub fn step_rate_env<R: Rng>(
    profile: &DrafterProfile,
    round: u64,
    n_max: u32,
    rng: &mut R,
) -> RoundOutcome {
    debug_assert!(n_max >= 1);
    let dist = profile.active_dist(round);
    let alphas: Vec<f64> = (0..n_max).map(|_| dist.sample(rng)).collect();
    let mut n_acc = 0u32;
    for &alpha in &alphas {
        if rng.gen::<f64>() < alpha {
            n_acc += 1;
        } else {
            break;
        }
    }
    let bd = alphas.iter().sum::<f64>() / f64::from(n_max);
    let be = rewards::be_reward(n_acc, n_max).expect("n_acc bounded by n_max");
    RoundOutcome {
        n_acc,
        bd_reward: bd,
        be_reward: be,
        tokens_emitted: n_acc + 1,
        alphas_drawn: alphas,
        switched: false,
        degenerate: false,
    }
}

/// Distribution-level environment over a small categorical vocabulary.
///
/// The target and each drafter are explicit probability vectors; a round
/// runs the exact accept/residual speculative-sampling rule against them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalEnv {
    pub vocab_size: usize,
    pub target: Vec<f64>,
    pub drafters: Vec<Vec<f64>>,
    /// Softmax temperature applied to both sides before each round;
    /// 0 means greedy (argmax one-hot).
    pub temperature: f64,
}

/// Applies softmax temperature to a probability vector.
///
/// `t = 1` is the identity, `t = 0` collapses to a one-hot at the argmax
/// (ties broken toward the lowest index).
pub fn apply_temperature(p: &[f64], t: f64) -> Vec<f64> {
    if t == 1.0 {
        return p.to_vec();
    }
    if t == 0.0 {
        let mut best = 0;
        for (i, &v) in p.iter().enumerate() {
            if v > p[best] {
                best = i;
            }
        }
        let mut out = vec![0.0; p.len()];
        out[best] = 1.0;
        return out;
    }
    let powered: Vec<f64> = p.iter().map(|&v| v.powf(1.0 / t)).collect();
    let z: f64 = powered.iter().sum();
    powered.into_iter().map(|v| v / z).collect()
}

fn sample_categorical<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_support = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_support = i;
            acc += p;
            if u < acc {
                return i;
            }
        }
    }
    // Rounding left u above the accumulated mass; the tail belongs to the
    // last supported symbol.
    last_support
}

impl CategoricalEnv {
    /// Acceptance rate implied by the construction for drafter `i` at
    /// temperature 1: `1 − d_TV(target, q_i)`.
    pub fn implied_alpha(&self, drafter_index: usize) -> f64 {
        1.0 - rewards::tv_distance(&self.target, &self.drafters[drafter_index])
            .expect("constructed vectors are normalized")
    }
}

/// Builds a categorical environment in which drafter `i` has TV distance
/// exactly `1 − alphas[i]` from the target.
///
/// The target is supported on the first half of the vocabulary and each
/// drafter is the mixture `alpha·target + (1 − alpha)·noise_i` with the
/// noise supported on the second half; disjoint supports make the mixture
/// weight the exact TV distance.
pub fn make_categorical_env<R: Rng>(
    vocab_size: usize,
    alphas: &[f64],
    temperature: f64,
    rng: &mut R,
) -> Result<CategoricalEnv, EnvError> {
    if vocab_size < 4 {
        return Err(EnvError::VocabTooSmall(vocab_size));
    }
    if temperature < 0.0 {
        return Err(EnvError::NegativeTemperature(temperature));
    }
    for &a in alphas {
        if !(0.0..=1.0).contains(&a) {
            return Err(EnvError::AlphaOutOfRange(a));
        }
    }
    let half = vocab_size / 2;
    let simplex = |rng: &mut R, lo: usize, hi: usize| -> Vec<f64> {
        let mut v = vec![0.0; vocab_size];
        let mut total = 0.0;
        for slot in v.iter_mut().take(hi).skip(lo) {
            // Exp(1) variates normalize to a uniform simplex point.
            let e = -(1.0 - rng.gen::<f64>()).ln();
            *slot = e;
            total += e;
        }
        for slot in v.iter_mut() {
            *slot /= total;
        }
        v
    };
    let target = simplex(rng, 0, half);
    let drafters = alphas
        .iter()
        .map(|&alpha| {
            let noise = simplex(rng, half, vocab_size);
            target
                .iter()
                .zip(&noise)
                .map(|(&p, &u)| alpha * p + (1.0 - alpha) * u)
                .collect()
        })
        .collect();
    Ok(CategoricalEnv {
        vocab_size,
        target,
        drafters,
        temperature,
    })
}

/// One distribution-level round with the exact accept/residual rule.
///
/// Returns the outcome plus the tokens emitted this round (accepted
/// drafts, then either the residual-sampled correction or the bonus
/// token), which callers can collect to audit the output distribution.
pub fn step_dist_env_with_tokens<R: Rng>(
    env: &CategoricalEnv,
    drafter_index: usize,
    n_max: u32,
    rng: &mut R,
) -> (RoundOutcome, Vec<usize>) {
    debug_assert!(n_max >= 1);
    let p = apply_temperature(&env.target, env.temperature);
    let q = apply_temperature(&env.drafters[drafter_index], env.temperature);

    // BD always scores against full distributions: tempered ones when
    // sampling is tempered, the raw ones under greedy decoding.
    let tv = if env.temperature == 0.0 {
        rewards::tv_distance(&env.target, &env.drafters[drafter_index])
    } else {
        rewards::tv_distance(&p, &q)
    }
    .expect("environment vectors are normalized");
    let tvs = vec![tv; n_max as usize];

    let mut tokens = Vec::with_capacity(n_max as usize + 1);
    let mut n_acc = 0u32;
    let mut degenerate = false;
    for _ in 0..n_max {
        let drafted = sample_categorical(&q, rng);
        let ratio = if q[drafted] > 0.0 {
            p[drafted] / q[drafted]
        } else {
            1.0
        };
        if rng.gen::<f64>() < ratio.min(1.0) {
            tokens.push(drafted);
            n_acc += 1;
            continue;
        }
        // Rejected: correct from the residual (p − q)_+, renormalized.
        let residual: Vec<f64> = p.iter().zip(&q).map(|(&a, &b)| (a - b).max(0.0)).collect();
        let mass: f64 = residual.iter().sum();
        if mass <= f64::EPSILON {
            // p == q at this position: nothing to correct, keep the draft.
            tokens.push(drafted);
            n_acc += 1;
            degenerate = true;
            continue;
        }
        let normalized: Vec<f64> = residual.iter().map(|&r| r / mass).collect();
        tokens.push(sample_categorical(&normalized, rng));
        break;
    }
    if n_acc == n_max {
        // Every draft accepted: one extra token straight from the target.
        tokens.push(sample_categorical(&p, rng));
    }

    let bd = rewards::bd_reward(&tvs, n_max as usize).expect("length matches");
    let be = rewards::be_reward(n_acc, n_max).expect("n_acc bounded by n_max");
    let outcome = RoundOutcome {
        n_acc,
        bd_reward: bd,
        be_reward: be,
        tokens_emitted: n_acc + 1,
        alphas_drawn: tvs.iter().map(|t| 1.0 - t).collect(),
        switched: false,
        degenerate,
    };
    (outcome, tokens)
}

/// [`step_dist_env_with_tokens`] without the emitted-token audit trail.
pub fn step_dist_env<R: Rng>(
    env: &CategoricalEnv,
    drafter_index: usize,
    n_max: u32,
    rng: &mut R,
) -> RoundOutcome {
    step_dist_env_with_tokens(env, drafter_index, n_max, rng).0
}
