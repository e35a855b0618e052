//! Result serialization: results.json, curve.csv, traces.csv, plot.svg.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::config::ExperimentConfig;
use super::experiment::{BestArmCurve, ExperimentResult};
use crate::analytics::RegretReport;

#[derive(Debug, Error)]
#[error("writing {path}: {source}")]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Which optional artifacts to emit.
#[derive(Debug, Clone, Copy, Default)]
pub struct WriteOptions {
    pub traces: bool,
    pub plot: bool,
}

#[derive(Serialize)]
struct ResultsJson<'a> {
    config: &'a ExperimentConfig,
    policy_mean_rounds: f64,
    oracle_mean_rounds: f64,
    stopping_regret: f64,
    std_err: f64,
    switching_term: Option<f64>,
    replications: u32,
    seed: u64,
    tool_version: &'static str,
    /// Unix seconds; the only field excluded from determinism
    /// comparisons.
    generated_at: u64,
}

fn write_file(path: &Path, contents: &str) -> Result<(), OutputError> {
    fs::write(path, contents).map_err(|source| OutputError {
        path: path.to_path_buf(),
        source,
    })
}

/// Serialize an experiment into `out_dir`, returning the files written.
pub fn write_results(
    result: &ExperimentResult,
    cfg: &ExperimentConfig,
    out_dir: &Path,
    opts: WriteOptions,
) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(out_dir).map_err(|source| OutputError {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();

    let report: &RegretReport = &result.report;
    let results = ResultsJson {
        config: cfg,
        policy_mean_rounds: report.policy_mean_rounds,
        oracle_mean_rounds: report.oracle_mean_rounds,
        stopping_regret: report.stopping_regret,
        std_err: report.std_err,
        switching_term: report.switching_term,
        replications: report.replications,
        seed: cfg.base_seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        generated_at: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let json_path = out_dir.join("results.json");
    let body = serde_json::to_string_pretty(&results).expect("report serializes");
    write_file(&json_path, &body)?;
    written.push(json_path);

    let curve_path = out_dir.join("curve.csv");
    write_file(&curve_path, &curve_csv(&result.curve))?;
    written.push(curve_path);

    if opts.traces {
        let traces_path = out_dir.join("traces.csv");
        let mut body = String::from("replication,round,arm,n_acc,be,bd,l,switched\n");
        for (episode, trace) in result.policy_traces.iter().enumerate() {
            for rec in &trace.records {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{},{},{}",
                    episode, rec.round, rec.arm, rec.n_acc, rec.be, rec.bd, rec.l, rec.switched
                );
            }
        }
        write_file(&traces_path, &body)?;
        written.push(traces_path);
    }

    if opts.plot {
        let plot_path = out_dir.join("plot.svg");
        write_file(&plot_path, &curve_svg(&result.curve))?;
        written.push(plot_path);
    }

    Ok(written)
}

/// CSV rendering of a best-arm curve.
pub fn curve_csv(curve: &BestArmCurve) -> String {
    let mut body = String::from("round,best_arm_ratio,active_replications,se\n");
    for p in &curve.points {
        let _ = writeln!(
            body,
            "{},{},{},{}",
            p.round, p.best_arm_ratio, p.active_replications, p.se
        );
    }
    body
}

/// A minimal self-contained SVG line chart of the best-arm ratio.
pub fn curve_svg(curve: &BestArmCurve) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const MARGIN: f64 = 40.0;
    let n = curve.points.len().max(1) as f64;
    let x = |round: u64| MARGIN + (round as f64 - 1.0) / (n - 1.0).max(1.0) * (W - 2.0 * MARGIN);
    let y = |ratio: f64| H - MARGIN - ratio * (H - 2.0 * MARGIN);
    let mut path = String::new();
    for (i, p) in curve.points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(path, "{}{:.2},{:.2} ", cmd, x(p.round), y(p.best_arm_ratio));
    }
    format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}">"#,
            r#"<rect width="{w}" height="{h}" fill="white"/>"#,
            r#"<line x1="{m}" y1="{ybot}" x2="{xr}" y2="{ybot}" stroke="black"/>"#,
            r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{ybot}" stroke="black"/>"#,
            r#"<text x="{m}" y="{h}" font-size="12" dy="-8">rounds</text>"#,
            r#"<text x="4" y="{m}" font-size="12">best-arm ratio</text>"#,
            r#"<path d="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
            "</svg>\n"
        ),
        w = W,
        h = H,
        m = MARGIN,
        xr = W - MARGIN,
        ybot = H - MARGIN,
        path = path.trim_end(),
    )
}
