//! Command-line front end: run experiments from config files, execute the
//! verification suite, compare reward designs, sweep parameters, and emit
//! canned scenario configs.
//!
//! Exit codes are a stable contract: 0 success, 1 runtime or check
//! failure, 2 usage or configuration error.

mod overrides;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use specbandit::harness::{self, make_scenario, ExperimentConfig, WriteOptions, SCENARIO_NAMES};
use specbandit::verify::{self, Mutation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Seed fallback consulted when `--seed` is absent.
pub const SEED_ENV_VAR: &str = "SPECBANDIT_SEED";

#[derive(Parser)]
#[command(
    name = "specbandit",
    version,
    about = "Bandit drafter-selection simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigSource {
    /// Path to a JSON experiment config.
    #[arg(long, value_name = "PATH", conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Name of a canned scenario.
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
    /// Config overrides as dotted key=value pairs, applied after parsing.
    #[arg(long = "override", value_name = "K=V")]
    overrides: Vec<String>,
    /// Base seed override (beats SPECBANDIT_SEED and the config value).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct RunOutput {
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for replications (default: one per core).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Also write per-round traces.csv.
    #[arg(long)]
    traces: bool,
    /// Also write a plot.svg of the best-arm curve.
    #[arg(long)]
    plot: bool,
    /// Print extra progress detail.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write results.json and curve.csv.
    Run {
        #[command(flatten)]
        source: ConfigSource,
        #[command(flatten)]
        output: RunOutput,
    },
    /// Run the oracle-vs-Monte-Carlo verification suite.
    Verify {
        /// Comma-separated list of checks to run (default: all).
        #[arg(long, value_name = "LIST", value_delimiter = ',')]
        checks: Vec<String>,
        /// Seed for the Monte Carlo checks.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Paired-seed comparison of the BE and BD reward designs under UCB.
    CompareRewards {
        #[command(flatten)]
        source: ConfigSource,
        #[command(flatten)]
        output: RunOutput,
    },
    /// Run the experiment once per value of a swept parameter.
    Sweep {
        #[command(flatten)]
        source: ConfigSource,
        #[command(flatten)]
        output: RunOutput,
        /// Dotted config path to sweep (e.g. n_max or policy.beta).
        #[arg(long, value_name = "NAME")]
        param: String,
        /// Comma-separated values for the swept parameter.
        #[arg(long, value_name = "V1,V2,...", value_delimiter = ',')]
        values: Vec<String>,
    },
    /// Print a canned scenario config as JSON.
    Scenario {
        /// One of the scenario names.
        name: String,
        /// Write to a file instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

/// Entry point shared by the binary and the tests. Returns the process
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run { source, output } => cmd_run(&source, &output),
        Command::Verify {
            checks,
            seed,
            verbose,
        } => cmd_verify(&checks, seed, verbose),
        Command::CompareRewards { source, output } => cmd_compare_rewards(&source, &output),
        Command::Sweep {
            source,
            output,
            param,
            values,
        } => cmd_sweep(&source, &output, &param, &values),
        Command::Scenario { name, out } => cmd_scenario(&name, out.as_deref()),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.code()
        }
    }
}

/// Resolve the experiment config from a file or scenario, apply
/// overrides, then the seed precedence (--seed, env var, config).
fn load_config(source: &ConfigSource) -> Result<ExperimentConfig, CliError> {
    let mut value: serde_json::Value = match (&source.config, &source.scenario) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("reading config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("parsing config: {e}")))?
        }
        (None, Some(name)) => {
            let cfg = make_scenario(name).map_err(|e| CliError::Usage(e.to_string()))?;
            serde_json::to_value(cfg).expect("config serializes")
        }
        (None, None) => {
            return Err(CliError::Usage(
                "pass --config PATH or --scenario NAME".to_string(),
            ));
        }
        (Some(_), Some(_)) => unreachable!("clap forbids the combination"),
    };
    for entry in &source.overrides {
        let (key, raw) = overrides::parse(entry).map_err(CliError::Usage)?;
        overrides::apply(&mut value, key, raw).map_err(CliError::Usage)?;
    }
    let mut cfg: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| CliError::Usage(format!("config error: {e}")))?;
    if let Some(seed) = source.seed {
        cfg.base_seed = seed;
    } else if let Ok(text) = std::env::var(SEED_ENV_VAR) {
        cfg.base_seed = text
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV_VAR}={text} is not a valid seed")))?;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Run `f` under a dedicated thread pool when --jobs was given.
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Runtime(format!("building thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn cmd_run(source: &ConfigSource, output: &RunOutput) -> Result<(), CliError> {
    let cfg = load_config(source)?;
    if output.verbose {
        eprintln!(
            "running {} replications of k={} n_max={} ...",
            cfg.replications, cfg.k, cfg.n_max
        );
    }
    let result = with_jobs(output.jobs, || harness::run_experiment(&cfg))?
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = WriteOptions {
        traces: output.traces,
        plot: output.plot,
    };
    let files = harness::write_results(&result, &cfg, &output.out, opts)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!(
        "policy rounds {:.3}  oracle rounds {:.3}  regret {:.3} ± {:.3}{}",
        result.report.policy_mean_rounds,
        result.report.oracle_mean_rounds,
        result.report.stopping_regret,
        result.report.std_err,
        match result.report.switching_term {
            Some(term) => format!("  switching term {term:.3}"),
            None => String::new(),
        }
    );
    if output.verbose {
        // Leading term of the regret upper bound (additive constants
        // omitted), using the mean budget when the budget is random.
        let means: Vec<f64> = cfg.drafters.iter().map(|d| d.mean_at(1)).collect();
        let term = specbandit::analytics::regret_bound_leading_term(
            &means,
            cfg.n_max,
            cfg.expected_budget().round() as u64,
            cfg.reward,
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        eprintln!(
            "regret bound leading term {:.1}{}",
            term.value,
            if term.duplicate_optimum {
                " (tied optimum arms contribute zero)"
            } else {
                ""
            }
        );
    }
    for file in files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn cmd_verify(checks: &[String], seed: Option<u64>, verbose: bool) -> Result<(), CliError> {
    let seed = resolve_seed(seed)?;
    let filter = if checks.is_empty() {
        None
    } else {
        Some(checks)
    };
    let results = verify::run_checks(filter, seed, Mutation::None)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(8);
    for r in &results {
        if verbose {
            println!(
                "{:width$}  {}  {}",
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.detail
            );
        } else {
            println!(
                "{:width$}  {}",
                r.name,
                if r.passed { "PASS" } else { "FAIL" }
            );
        }
    }
    let failing: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failing.is_empty() {
        println!("all {} checks passed (seed {seed})", results.len());
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "failing checks: {}",
            failing.join(", ")
        )))
    }
}

fn resolve_seed(cli_seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = cli_seed {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV_VAR}={text} is not a valid seed"))),
        Err(_) => Ok(42),
    }
}

fn cmd_compare_rewards(source: &ConfigSource, output: &RunOutput) -> Result<(), CliError> {
    let cfg = load_config(source)?;
    let comparison = with_jobs(output.jobs, || harness::compare_rewards(&cfg))?
        .map_err(|e| CliError::Usage(e.to_string()))?;
    std::fs::create_dir_all(&output.out)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", output.out.display())))?;
    let write = |name: &str, body: String| -> Result<(), CliError> {
        let path = output.out.join(name);
        std::fs::write(&path, body)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    };
    write("bd_curve.csv", harness::curve_csv(&comparison.bd_curve))?;
    write("be_curve.csv", harness::curve_csv(&comparison.be_curve))?;
    let summary = serde_json::json!({
        "config": cfg,
        "bd_median_rounds_to_09": comparison.bd_median_rounds_to_09,
        "be_median_rounds_to_09": comparison.be_median_rounds_to_09,
        "bd_no_later_fraction": comparison.bd_no_later_fraction,
        "bd_group_rounds_to_09": comparison.bd_group_rounds_to_09,
        "be_group_rounds_to_09": comparison.be_group_rounds_to_09,
    });
    write(
        "compare.json",
        serde_json::to_string_pretty(&summary).expect("serializes"),
    )?;
    println!(
        "median rounds to 0.9 best-arm ratio: bd {:?}, be {:?} (bd no later in {:.0}% of groups)",
        comparison.bd_median_rounds_to_09,
        comparison.be_median_rounds_to_09,
        comparison.bd_no_later_fraction * 100.0
    );
    Ok(())
}

fn cmd_sweep(
    source: &ConfigSource,
    output: &RunOutput,
    param: &str,
    values: &[String],
) -> Result<(), CliError> {
    let values: Vec<&String> = values.iter().filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(CliError::Usage(
            "sweep needs a nonempty --values list".to_string(),
        ));
    }
    let mut rows = String::from(
        "param,value,policy_mean_rounds,oracle_mean_rounds,stopping_regret,std_err,mean_nacc_per_round\n",
    );
    for value in values {
        let mut swept = source.clone();
        swept.overrides.push(format!("{param}={value}"));
        let cfg = load_config(&swept)?;
        let result = with_jobs(output.jobs, || harness::run_experiment(&cfg))?
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let _ = writeln!(
            rows,
            "{},{},{},{},{},{},{}",
            param,
            value,
            result.report.policy_mean_rounds,
            result.report.oracle_mean_rounds,
            result.report.stopping_regret,
            result.report.std_err,
            result.mean_nacc_per_round
        );
        if output.verbose {
            eprintln!(
                "swept {param}={value}: regret {:.3}",
                result.report.stopping_regret
            );
        }
    }
    std::fs::create_dir_all(&output.out)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", output.out.display())))?;
    let path = output.out.join("sweep.csv");
    std::fs::write(&path, rows)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_scenario(name: &str, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = make_scenario(name).map_err(|e| {
        CliError::Usage(format!(
            "{e}; known scenarios: {}",
            SCENARIO_NAMES.join(", ")
        ))
    })?;
    let body = serde_json::to_string_pretty(&cfg).expect("config serializes");
    match out {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
        None => println!("{body}"),
    }
    Ok(())
}
