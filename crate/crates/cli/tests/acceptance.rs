//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them).
//!
//! Expected values come from independent oracles computed in this file
//! (exhaustive enumeration, an exact renewal recursion, direct
//! sampling) or from closed forms checked against those oracles.

use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;

use specbandit::analytics;
use specbandit::env::{self, AlignmentDist, DrafterProfile};
use specbandit::harness::{
    self, compare_rewards, make_scenario, run_experiment, run_replication, BudgetSpec, EnvSpec,
    ExperimentConfig, PolicySpec, RuntimeEnv,
};
use specbandit::policies::Petc;
use specbandit::rewards::RewardKind;
use specbandit::seeding;

/// Seed for every Monte Carlo criterion.
const SEED: u64 = 42;

/// Serializes the compute-heavy criteria so wall-clock budgets are
/// measured without contention from sibling tests.
static HEAVY: Mutex<()> = Mutex::new(());

fn heavy() -> std::sync::MutexGuard<'static, ()> {
    HEAVY
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(criterion: u32, passed: bool, detail: &str) {
    println!(
        "criterion {criterion:02} {}  {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

const ALPHA_GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const N_GRID: [u32; 3] = [2, 5, 8];

/// Central moments of the accepted-count distribution by exhaustive
/// enumeration over its n+1 outcomes.
fn enum_central_moments(alpha: f64, n_max: u32) -> (f64, f64, f64) {
    let pmf = analytics::nacc_pmf(alpha, n_max);
    let mean: f64 = pmf.iter().enumerate().map(|(j, p)| j as f64 * p).sum();
    let var: f64 = pmf
        .iter()
        .enumerate()
        .map(|(j, p)| (j as f64 - mean).powi(2) * p)
        .sum();
    let m4: f64 = pmf
        .iter()
        .enumerate()
        .map(|(j, p)| (j as f64 - mean).powi(4) * p)
        .sum();
    (mean, var, m4)
}

/// Criterion 1: Monte Carlo moments of the accepted count match the
/// closed forms within 4 standard errors on the (alpha, n) grid, in
/// under ten seconds.
#[test]
fn criterion_01_monte_carlo_matches_closed_forms() {
    let _guard = heavy();
    let start = Instant::now();
    let rounds = 200_000u32;
    let mut worst_z = 0.0f64;
    let mut ok = true;
    for &n in &N_GRID {
        for &alpha in &ALPHA_GRID {
            let profile = DrafterProfile::stationary(0, AlignmentDist::point(alpha));
            let mut rng = seeding::stream(&[SEED, 1, n.into(), alpha.to_bits()]);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for t in 0..rounds {
                let out = env::step_rate_env(&profile, u64::from(t) + 1, n, &mut rng);
                let x = f64::from(out.n_acc);
                sum += x;
                sum_sq += x * x;
            }
            let m = f64::from(rounds);
            let mc_mean = sum / m;
            let mc_var = (sum_sq - m * mc_mean * mc_mean) / (m - 1.0);
            let closed_mean = analytics::expected_nacc(alpha, n).unwrap();
            let closed_var = analytics::var_nacc(alpha, n).unwrap();
            let (_, true_var, m4) = enum_central_moments(alpha, n);
            let se_mean = (true_var / m).sqrt();
            let se_var = ((m4 - true_var * true_var) / m).sqrt();
            let z_mean = if se_mean > 0.0 {
                (mc_mean - closed_mean).abs() / se_mean
            } else {
                0.0
            };
            let z_var = if se_var > 0.0 {
                (mc_var - closed_var).abs() / se_var
            } else {
                0.0
            };
            worst_z = worst_z.max(z_mean).max(z_var);
            if z_mean > 4.0 || z_var > 4.0 {
                ok = false;
            }
        }
    }
    // Spot values for (0.5, 2).
    let spot_mean = analytics::expected_nacc(0.5, 2).unwrap();
    let spot_var = analytics::var_nacc(0.5, 2).unwrap();
    ok &= (spot_mean - 0.75).abs() < 1e-15 && (spot_var - 0.6875).abs() < 1e-15;
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 10.0;
    report(
        1,
        ok,
        &format!("15 grid points x {rounds} rounds, worst |z| = {worst_z:.2}, {elapsed:.1}s"),
    );
    assert!(ok);
}

/// Criterion 2: the closed forms equal probability-weighted enumeration
/// to 1e-12 across the full grid, in under a second.
#[test]
fn criterion_02_enumeration_oracle_agreement() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=8u32 {
        for step in 1..=19 {
            let alpha = f64::from(step) * 0.05;
            let (mean, var, _) = enum_central_moments(alpha, n);
            worst = worst.max((analytics::expected_nacc(alpha, n).unwrap() - mean).abs());
            worst = worst.max((analytics::var_nacc(alpha, n).unwrap() - var).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst < 1e-12 && elapsed < 1.0;
    report(2, ok, &format!("max deviation {worst:.2e}, {elapsed:.2}s"));
    assert!(ok);
}

/// Criterion 3: the mean identity between the two rewards,
/// `E[BE]·n·(1−α) = (1−α^n)·E[BD]`, analytically to 1e-12 and
/// empirically within 4 SE.
#[test]
fn criterion_03_reward_mean_identity() {
    let _guard = heavy();
    let mut ok = true;
    let mut worst_analytic = 0.0f64;
    for &n in &N_GRID {
        for &alpha in &ALPHA_GRID {
            let (be_mean, _) = analytics::be_stats(alpha, n).unwrap();
            let lhs = be_mean * f64::from(n) * (1.0 - alpha);
            let rhs = (1.0 - alpha.powi(n as i32)) * alpha;
            worst_analytic = worst_analytic.max((lhs - rhs).abs());
        }
    }
    ok &= worst_analytic < 1e-12;

    let rounds = 200_000u32;
    let mut worst_z = 0.0f64;
    for &n in &N_GRID {
        for &alpha in &ALPHA_GRID {
            let profile = DrafterProfile::stationary(0, AlignmentDist::point(alpha));
            let mut rng = seeding::stream(&[SEED, 3, n.into(), alpha.to_bits()]);
            let mut be_sum = 0.0;
            let mut bd_sum = 0.0;
            for t in 0..rounds {
                let out = env::step_rate_env(&profile, u64::from(t) + 1, n, &mut rng);
                be_sum += out.be_reward;
                bd_sum += out.bd_reward;
            }
            let m = f64::from(rounds);
            let lhs = be_sum / m * f64::from(n) * (1.0 - alpha);
            let rhs = (1.0 - alpha.powi(n as i32)) * (bd_sum / m);
            let (_, be_var) = analytics::be_stats(alpha, n).unwrap();
            let se = f64::from(n) * (1.0 - alpha) * (be_var / m).sqrt();
            if se > 0.0 {
                let z = (lhs - rhs).abs() / se;
                worst_z = worst_z.max(z);
                ok &= z <= 4.0;
            } else {
                ok &= (lhs - rhs).abs() < 1e-12;
            }
        }
    }
    report(
        3,
        ok,
        &format!("analytic max {worst_analytic:.2e}, empirical worst |z| = {worst_z:.2}"),
    );
    assert!(ok);
}

/// Criterion 4: empirical BD-reward variance respects the `1/(4n)` cap
/// for scaled-Beta alignment noise across the grid.
#[test]
fn criterion_04_bd_variance_bound() {
    let _guard = heavy();
    let rounds = 100_000u32;
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for &n in &N_GRID {
        for &alpha in &ALPHA_GRID {
            let dist = AlignmentDist::beta(2.0 * alpha, 2.0 * (1.0 - alpha), 0.0, 1.0);
            let profile = DrafterProfile::stationary(0, dist);
            let mut rng = seeding::stream(&[SEED, 4, n.into(), alpha.to_bits()]);
            let samples: Vec<f64> = (0..rounds)
                .map(|t| env::step_rate_env(&profile, u64::from(t) + 1, n, &mut rng).bd_reward)
                .collect();
            let m = f64::from(rounds);
            let mean = samples.iter().sum::<f64>() / m;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / m;
            let se_var = ((m4 - var * var) / m).sqrt();
            let bound = 1.0 / (4.0 * f64::from(n));
            ok &= var <= bound + 4.0 * se_var;
            worst_ratio = worst_ratio.max(var / bound);
        }
    }
    report(
        4,
        ok,
        &format!("max empirical variance / bound = {worst_ratio:.3}"),
    );
    assert!(ok);
}

/// Criterion 5: the dominance-condition scan at n=5 holds throughout
/// [0.07, 0.79] and fails at 0.05 and 0.85, in under a second.
#[test]
fn criterion_05_condition_interval() {
    let start = Instant::now();
    let n = 5;
    let mut lo = None;
    let mut hi = None;
    let mut interval_ok = true;
    for step in 1..200 {
        let x = f64::from(step) * 0.005;
        if x >= 1.0 {
            break;
        }
        let holds = analytics::signal_dominance_condition(x, n);
        if holds {
            lo.get_or_insert(x);
            hi = Some(x);
        }
        if (0.07..=0.79).contains(&x) && !holds {
            interval_ok = false;
        }
    }
    let ok = interval_ok
        && !analytics::signal_dominance_condition(0.05, n)
        && !analytics::signal_dominance_condition(0.85, n)
        && start.elapsed().as_secs_f64() < 1.0;
    report(
        5,
        ok,
        &format!(
            "condition holds on [{:.3}, {:.3}] at n=5",
            lo.unwrap_or(0.0),
            hi.unwrap_or(0.0)
        ),
    );
    assert!(ok);
}

/// Criterion 6: the BD feedback signal computed with the variance cap is
/// at least `4·Δ²·n` on every grid configuration.
#[test]
fn criterion_06_bd_signal_floor() {
    let mut ok = true;
    let mut configs = 0;
    for &n in &N_GRID {
        let cap = 1.0 / (4.0 * f64::from(n));
        for &star in &ALPHA_GRID {
            for &alpha in &ALPHA_GRID {
                if alpha >= star {
                    continue;
                }
                configs += 1;
                let delta = star - alpha;
                let signal = analytics::feedback_signal(delta, cap, cap);
                let floor = 4.0 * delta * delta * f64::from(n);
                // Mathematically equal with the cap saturated; allow only
                // rounding slack.
                ok &= signal >= floor * (1.0 - 1e-12);
                ok &= ((signal - floor) / floor).abs() < 1e-9;
            }
        }
    }
    report(
        6,
        ok,
        &format!("floor met with equality on {configs} configurations"),
    );
    assert!(ok);
}

/// Criterion 7: the accept/residual rule is lossless: the emitted-token
/// distribution stays within TV 0.02 of the target over 1e5 tokens.
#[test]
fn criterion_07_speculative_sampling_losslessness() {
    let _guard = heavy();
    let start = Instant::now();
    let vocab = 16;
    let want = 100_000usize;
    let mut build = seeding::stream(&[SEED, 7, 0]);
    let cat = env::make_categorical_env(vocab, &[0.6], 1.0, &mut build).unwrap();
    let mut counts = vec![0u64; vocab];
    let mut emitted = 0usize;
    let mut rng = seeding::stream(&[SEED, 7, 1]);
    while emitted < want {
        let (_, tokens) = env::step_dist_env_with_tokens(&cat, 0, 5, &mut rng);
        for t in tokens {
            if emitted == want {
                break;
            }
            counts[t] += 1;
            emitted += 1;
        }
    }
    let tv: f64 = counts
        .iter()
        .zip(&cat.target)
        .map(|(&c, &p)| (c as f64 / want as f64 - p).abs())
        .sum::<f64>()
        / 2.0;
    // Direct-sampling oracle at the same sample size, for scale.
    let mut direct = vec![0u64; vocab];
    let mut oracle_rng = seeding::stream(&[SEED, 7, 2]);
    for _ in 0..want {
        let u: f64 = oracle_rng.gen();
        let mut acc = 0.0;
        for (i, &p) in cat.target.iter().enumerate() {
            acc += p;
            if u < acc {
                direct[i] += 1;
                break;
            }
        }
    }
    let tv_oracle: f64 = direct
        .iter()
        .zip(&cat.target)
        .map(|(&c, &p)| (c as f64 / want as f64 - p).abs())
        .sum::<f64>()
        / 2.0;
    let elapsed = start.elapsed().as_secs_f64();
    let ok = tv <= 0.02 && elapsed < 20.0;
    report(
        7,
        ok,
        &format!("emitted TV {tv:.5} (oracle TV {tv_oracle:.5}), {elapsed:.1}s"),
    );
    assert!(ok);
}

/// Exact expected stopping time by the renewal recursion
/// `m(b) = 1 + Σ_x P(tokens = x)·m(b − x)`, the independent oracle for
/// criterion 8.
fn exact_expected_rounds(alpha: f64, n_max: u32, budget: u64) -> f64 {
    let pmf = analytics::nacc_pmf(alpha, n_max); // index j → j+1 tokens
    let mut m = vec![0.0f64; budget as usize + 1];
    for b in 1..=budget as usize {
        let mut value = 1.0;
        for (j, &pj) in pmf.iter().enumerate() {
            let tokens = j + 1;
            if b > tokens {
                value += pj * m[b - tokens];
            }
        }
        m[b] = value;
    }
    m[budget as usize]
}

/// Criterion 8: the single-arm stopping-time estimate over 1e3
/// replications lies strictly inside the analytic bounds for
/// (0.5, 2, 1e4) and (0.8, 5, 1e4).
#[test]
fn criterion_08_single_arm_stopping_bounds() {
    let _guard = heavy();
    let reps = 1_000u32;
    let mut all_ok = true;
    let mut details = Vec::new();
    for (alpha, n_max, budget) in [(0.5, 2u32, 10_000u64), (0.8, 5, 10_000)] {
        let cfg = ExperimentConfig {
            k: 1,
            n_max,
            budget_b: BudgetSpec::Fixed(budget),
            drafters: vec![DrafterProfile::stationary(0, AlignmentDist::point(alpha))],
            policy: PolicySpec::Oracle,
            reward: RewardKind::Bd,
            env: EnvSpec::Rate,
            replications: reps,
            base_seed: SEED,
            lambda_switch: 0.0,
            query_stream: None,
            shared_round_noise: false,
        };
        let env = RuntimeEnv::prepare(&cfg).unwrap();
        let mut total = 0u64;
        for rep in 0..reps {
            total += harness::run_episode(&cfg, &env, rep).rounds();
        }
        let mc = total as f64 / f64::from(reps);
        let (lo, hi) = analytics::single_arm_stopping_bounds(alpha, n_max, budget);
        let exact = exact_expected_rounds(alpha, n_max, budget);
        let inside = mc > lo && mc < hi;
        all_ok &= inside;
        details.push(format!(
            "(α={alpha}, n={n_max}): MC {mc:.2}, exact {exact:.2}, bounds ({lo:.2}, {hi:.2}) → {}",
            if inside { "inside" } else { "OUTSIDE" }
        ));
    }
    report(8, all_ok, &details.join("; "));
    assert!(all_ok, "{}", details.join("; "));
}

/// Criterion 9: the fixed three-drafter instance returns exactly
/// (0.7, 0.6, 1.55, 1.50) and flags the ordering inversion.
#[test]
fn criterion_09_objective_mismatch_instance() {
    let inst = analytics::objective_mismatch_instance();
    let ok = inst.regret_bd_pi1 == 0.7
        && inst.regret_bd_pi2 == 0.6
        && inst.expected_tokens_pi1 == 1.55
        && inst.expected_tokens_pi2 == 1.50
        && inst.inversion;
    report(
        9,
        ok,
        &format!(
            "regrets ({}, {}), tokens ({}, {}), inversion {}",
            inst.regret_bd_pi1,
            inst.regret_bd_pi2,
            inst.expected_tokens_pi1,
            inst.expected_tokens_pi2,
            inst.inversion
        ),
    );
    assert!(ok);
}

/// Criterion 10: logarithmic regret scaling of UCB+BD on the stationary
/// pool. Regret/ln B agrees within a factor of two between B = 1e4 and
/// B = 1e5, and the 1e5 regret is under 1% of the always-worst-arm
/// regret. Budget: three minutes.
#[test]
fn criterion_10_log_regret_scaling() {
    let _guard = heavy();
    let start = Instant::now();
    let mut regrets = Vec::new();
    for budget in [1_000u64, 10_000, 100_000] {
        let mut cfg = make_scenario("stationary_k5").unwrap();
        cfg.budget_b = BudgetSpec::Fixed(budget);
        let result = run_experiment(&cfg).unwrap();
        regrets.push((budget, result.report.stopping_regret, result.report.std_err));
    }
    let norm = |(b, r, _): &(u64, f64, f64)| r / (*b as f64).ln();
    let ratio = norm(&regrets[2]) / norm(&regrets[1]);
    let worst_alpha = harness::STATIONARY_K5_MEANS
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let best_alpha = harness::STATIONARY_K5_MEANS
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let always_worst_regret = 100_000.0
        * (analytics::rounds_per_token(worst_alpha, 5)
            - analytics::rounds_per_token(best_alpha, 5));
    let r5 = regrets[2].1;
    let elapsed = start.elapsed().as_secs_f64();
    let ok = (0.5..=2.0).contains(&ratio) && r5 < 0.01 * always_worst_regret && elapsed < 180.0;
    report(
        10,
        ok,
        &format!(
            "regret(1e3,1e4,1e5) = ({:.2}, {:.2}, {:.2}), normalized ratio {ratio:.3}, \
             worst-arm regret {always_worst_regret:.0}, {elapsed:.0}s",
            regrets[0].1, regrets[1].1, regrets[2].1
        ),
    );
    assert!(ok);
}

/// Criterion 11: with paired seeds over 500 replications, UCB+BD reaches
/// a sustained 0.9 best-arm ratio no later than UCB+BE (median over seed
/// groups).
#[test]
fn criterion_11_bd_converges_no_later_than_be() {
    let _guard = heavy();
    let mut cfg = make_scenario("stationary_k5").unwrap();
    cfg.replications = 500;
    let comparison = compare_rewards(&cfg).unwrap();
    let bd = comparison.bd_median_rounds_to_09;
    let be = comparison.be_median_rounds_to_09;
    // A group that never converges counts as slower than any that does.
    let no_later = match (bd, be) {
        (Some(b), Some(e)) => b <= e,
        (Some(_), None) => true,
        (None, None) => true,
        (None, Some(_)) => false,
    };
    let ok = no_later && comparison.bd_no_later_fraction >= 0.8;
    report(
        11,
        ok,
        &format!(
            "median rounds-to-0.9: bd {bd:?} vs be {be:?}; bd no later in {:.0}% of groups",
            comparison.bd_no_later_fraction * 100.0
        ),
    );
    assert!(ok);
}

/// Criterion 12: every PETC switch happens within the exploration token
/// budget; the commit transition is the only switch allowed at the
/// boundary and nothing switches after it.
#[test]
fn criterion_12_petc_switching_containment() {
    let _guard = heavy();
    let cfg = make_scenario("switching_cost").unwrap();
    let PolicySpec::Petc { c } = cfg.policy else {
        panic!("switching scenario must use the explore-then-commit policy");
    };
    let b0 = Petc::new(cfg.k, c, cfg.expected_budget().round() as u64).explore_tokens();
    let env = RuntimeEnv::prepare(&cfg).unwrap();
    let mut ok = true;
    let mut max_switch_l = 0u64;
    for rep in 0..cfg.replications {
        let (traces, _) = run_replication(&cfg, &env, rep);
        for trace in traces {
            // Token count entering each round.
            let enterings: Vec<u64> = std::iter::once(0)
                .chain(trace.records.iter().map(|r| r.l))
                .take(trace.records.len())
                .collect();
            // The commit transition is the first round entering at or
            // past the boundary; it may switch into the committed arm,
            // nothing after it may switch at all.
            let commit_idx = enterings
                .iter()
                .position(|&e| e >= b0)
                .unwrap_or(trace.records.len());
            for (i, rec) in trace.records.iter().enumerate() {
                if !rec.switched {
                    continue;
                }
                max_switch_l = max_switch_l.max(enterings[i]);
                if i > commit_idx {
                    ok = false; // switch after the commit transition
                }
                if enterings[i] >= b0 && i != commit_idx {
                    ok = false; // exploration switch past the boundary
                }
            }
        }
    }
    report(
        12,
        ok,
        &format!(
            "{} replications, explore budget {b0} tokens, last switch entered at {max_switch_l}",
            cfg.replications
        ),
    );
    assert!(ok);
}

/// Criterion 13: after the best arm flips at round 200, the forgetting
/// variants recover while plain UCB does not: best-arm ratio over
/// rounds 300–400 at least 0.15 higher, median over 300 paired
/// replications.
#[test]
fn criterion_13_nonstationary_recovery() {
    let _guard = heavy();
    let base = make_scenario("piecewise_flip").unwrap();
    let window_ratio = |cfg: &ExperimentConfig, rep: u32, env: &RuntimeEnv| -> f64 {
        let (traces, _) = run_replication(cfg, env, rep);
        let trace = &traces[0];
        assert!(
            trace.rounds() > 400,
            "episode must still be running at round 400"
        );
        let best_after_flip = 4usize;
        let hits = trace.records[299..400]
            .iter()
            .filter(|r| r.arm == best_after_flip)
            .count();
        hits as f64 / 101.0
    };
    let mut ucb_cfg = base.clone();
    ucb_cfg.policy = PolicySpec::Ucb { beta: 0.01 };
    let mut ducb_cfg = base.clone();
    ducb_cfg.policy = PolicySpec::Ducb {
        gamma_d: 0.95,
        beta: 0.01,
    };
    let mut swucb_cfg = base.clone();
    swucb_cfg.policy = PolicySpec::Swucb {
        tau_w: Some(100),
        beta: 0.01,
    };
    let env = RuntimeEnv::prepare(&base).unwrap();
    let mut ducb_gains = Vec::new();
    let mut swucb_gains = Vec::new();
    for rep in 0..base.replications {
        let ucb = window_ratio(&ucb_cfg, rep, &env);
        ducb_gains.push(window_ratio(&ducb_cfg, rep, &env) - ucb);
        swucb_gains.push(window_ratio(&swucb_cfg, rep, &env) - ucb);
    }
    let median = |xs: &mut Vec<f64>| -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs[xs.len() / 2]
    };
    let ducb_median = median(&mut ducb_gains);
    let swucb_median = median(&mut swucb_gains);
    let ok = ducb_median >= 0.15 && swucb_median >= 0.15;
    report(
        13,
        ok,
        &format!(
            "median best-arm-ratio gain over rounds 300-400: discounted {ducb_median:.3}, \
             sliding-window {swucb_median:.3} (need 0.15)"
        ),
    );
    assert!(ok);
}

/// Criterion 14: two CLI runs with identical config and seed produce
/// byte-identical traces.csv.
#[test]
fn criterion_14_cli_trace_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let code = specbandit_cli::run([
            "specbandit",
            "run",
            "--scenario",
            "stationary_k5",
            "--override",
            "budget_b=500",
            "--override",
            "replications=20",
            "--seed",
            "4242",
            "--traces",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let a = std::fs::read(out_a.join("traces.csv")).unwrap();
    let b = std::fs::read(out_b.join("traces.csv")).unwrap();
    let ok = a == b;
    report(
        14,
        ok,
        &format!("traces.csv identical across runs ({} bytes)", a.len()),
    );
    assert!(ok);
}

/// The paired-seed example behind criterion 11's machinery: both reward
/// designs produce flat curves when every arm is identically (and
/// noisily) aligned, since no arm can be preferred systematically.
#[test]
fn identical_arms_leave_both_reward_curves_flat() {
    let mut cfg = make_scenario("stationary_k5").unwrap();
    for d in &mut cfg.drafters {
        d.dist = AlignmentDist::beta(3.5, 6.5, 0.0, 1.0);
    }
    cfg.budget_b = BudgetSpec::Fixed(600);
    cfg.replications = 200;
    let comparison = compare_rewards(&cfg).unwrap();
    for curve in [&comparison.bd_curve, &comparison.be_curve] {
        // Pool rounds 10..200 (all replications active well past there).
        // Rounds within one replication are correlated (a nearly greedy
        // policy settles on one arm), so the error scale is set by the
        // replication count alone.
        let mean: f64 = curve.points[10..200]
            .iter()
            .map(|p| p.best_arm_ratio)
            .sum::<f64>()
            / 190.0;
        let se = (0.2f64 * 0.8 / 200.0).sqrt();
        assert!(
            (mean - 0.2).abs() <= 3.0 * se,
            "flat curve expected at 1/K: {mean}"
        );
    }
}

/// Single-query comparison collapses to a single trivial group median.
#[test]
fn single_arm_comparison_is_degenerate() {
    let mut cfg = make_scenario("stationary_k5").unwrap();
    cfg.k = 1;
    cfg.drafters.truncate(1);
    cfg.budget_b = BudgetSpec::Fixed(300);
    cfg.replications = 40;
    let comparison = compare_rewards(&cfg).unwrap();
    // With one arm the best-arm ratio is identically 1 for both rewards.
    assert_eq!(comparison.bd_median_rounds_to_09, Some(1));
    assert_eq!(comparison.be_median_rounds_to_09, Some(1));
}
