//! Simulator and analysis toolkit for bandit-based drafter selection in
//! speculative decoding.
//!
//! A pool of synthetic drafters is modeled by alignment distributions
//! over per-token acceptance rates. Selection policies (UCB, EXP3,
//! sequential halving, explore-then-commit, discounted and
//! sliding-window UCB, plus oracle and random baselines) play rounds of
//! draft-verify-accept until a token budget is consumed, and the
//! resulting stopping times, reward streams, and best-arm ratios are
//! validated against closed-form statistics.
//!
//! Modules:
//!
//! * [`env`](module@env) — rate-level and distribution-level
//!   environments;
//! * [`rewards`] — the BE/BD reward signals and the TV-distance
//!   primitive;
//! * [`policies`] — the selection policies behind one [`policies::Policy`]
//!   trait;
//! * [`analytics`] — closed forms, feedback-signal machinery, stopping
//!   bounds, and regret estimators;
//! * [`harness`] — configuration, seeded replicated experiments, and
//!   serialization;
//! * [`verify`] — the oracle-vs-Monte-Carlo check suite.

pub mod analytics;
pub mod env;
pub mod harness;
pub mod policies;
pub mod rewards;
pub mod seeding;
pub mod verify;

pub use analytics::{RegretReport, SignalCurves};
pub use env::{AlignmentDist, CategoricalEnv, DrafterProfile, RoundOutcome, ScheduleEntry};
pub use harness::{
    BestArmCurve, BudgetSpec, EnvSpec, EpisodeTrace, ExperimentConfig, ExperimentResult,
    PolicySpec, RoundRecord,
};
pub use policies::Policy;
pub use rewards::RewardKind;
