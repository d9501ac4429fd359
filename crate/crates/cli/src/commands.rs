use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use kdsos::estimator::{decomposition_audit, kd_sos_with, KernelSpec, SeriesAggregator};
use kdsos::exec::Execution;
use kdsos::experiment::{run_experiment, ExperimentOverrides, ExperimentReport};
use kdsos::io::{format_memberships, format_series, load_memberships, load_series};
use kdsos::model::{alignable_sequence, hamming_error};
use kdsos::plot::emit_plots;
use kdsos::report::{summarize_membership_transitions, summarize_transitions, TransitionSummary};
use kdsos::tuner::{default_grid, tune_bandwidth_with, BandwidthScoreTable, TunerOptions};
use kdsos::{generate_scenario, ConfusionMatrix, Error, Permutation};
use serde::Serialize;

use crate::args::{AuditArgs, ExperimentArgs, FitArgs, SimulateArgs, SummarizeArgs, TuneArgs};
use crate::config::{ConfigFile, EffectiveConfig, EstimatorSettings};
use crate::error::{io_err, CliError, CliResult};

fn prepare(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_err(path))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    write(dir, name, &text)
}

fn scores_csv(grid: &[f64], scores: &[Option<f64>]) -> String {
    let mut out = String::from("r,theta\n");
    for (r, s) in grid.iter().zip(scores) {
        match s {
            Some(s) => writeln!(out, "{r},{s}"),
            None => writeln!(out, "{r},"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    config: &'a EffectiveConfig,
    edge_counts: Vec<usize>,
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let scenario = file.scenario(&args.scenario, args.common.seed)?;
    let (series, truth) = generate_scenario(&scenario)?;
    let out = &args.common.out;
    prepare(out)?;
    write(out, "series.txt", &format_series(&series))?;
    write(out, "truth.csv", &format_memberships(&truth.memberships))?;
    let config = EffectiveConfig { scenario: Some(scenario), ..Default::default() };
    let edge_counts = series.snapshots().iter().map(|a| a.edge_count()).collect();
    write_json(out, "report.json", &SimulateReport { config: &config, edge_counts })
}

fn tuner_options(settings: &EstimatorSettings) -> TunerOptions {
    TunerOptions { adjustment: settings.adjustment, half_window: settings.half_window, execution: Execution::Parallel }
}

fn run_tuner(agg: &SeriesAggregator<'_>, settings: &EstimatorSettings) -> CliResult<BandwidthScoreTable> {
    let grid = settings.grid.clone().unwrap_or_else(|| default_grid(agg.time_points()));
    Ok(tune_bandwidth_with(agg, &grid, settings.k, &tuner_options(settings))?)
}

#[derive(Serialize)]
struct FitReport<'a> {
    config: &'a EffectiveConfig,
    kernel: KernelSpec,
    alignable: bool,
    permutations: &'a [Permutation],
    confusions: &'a [ConfusionMatrix],
    eigenvalues: &'a [Vec<f64>],
    degenerate_gaps: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    tuning: Option<&'a BandwidthScoreTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hamming: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_hamming: Option<f64>,
}

pub fn fit(args: &FitArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let settings = file.estimator(&args.estimator, args.common.seed)?;
    let series = load_series(&args.series).map_err(|e| with_path(e, &args.series))?;
    let agg = SeriesAggregator::new(&series);
    let tuning = if settings.tune { Some(run_tuner(&agg, &settings)?) } else { None };
    let bandwidth = match (&tuning, settings.bandwidth) {
        (Some(table), _) => table.chosen,
        (None, Some(r)) => r,
        (None, None) => return Err(CliError::Config("a bandwidth (--r) or --tune is required".into())),
    };
    let kernel = KernelSpec { kind: settings.kernel, bandwidth };
    let clustering = kd_sos_with(&agg, settings.k, &kernel, settings.seed, Execution::Parallel)?;
    let hamming = match &args.truth {
        Some(path) => {
            let truth = load_memberships(path, Some(settings.k)).map_err(|e| with_path(e, path))?;
            if truth.len() != series.len() || truth.n() != series.n() {
                return Err(Error::LengthMismatch { expected: series.len() * series.n(), actual: truth.len() * truth.n() }.into());
            }
            let per_t = (0..truth.len())
                .map(|t| hamming_error(clustering.aligned.row(t), truth.row(t), settings.k))
                .collect::<kdsos::Result<Vec<_>>>()?;
            Some(per_t)
        }
        None => None,
    };
    let out = &args.common.out;
    prepare(out)?;
    write(out, "memberships.csv", &format_memberships(&clustering.aligned))?;
    if series.len() > 1 {
        write(out, "transitions.csv", &summarize_transitions(&clustering)?.to_csv())?;
    }
    if let Some(table) = &tuning {
        write(out, "scores.csv", &scores_csv(&table.grid, &table.scores))?;
    }
    let config = EffectiveConfig { estimator: Some(settings), ..Default::default() };
    let report = FitReport {
        config: &config,
        kernel,
        alignable: clustering.alignable,
        permutations: &clustering.permutations,
        confusions: &clustering.confusions,
        eigenvalues: &clustering.eigenvalues,
        degenerate_gaps: &clustering.degenerate_gaps,
        tuning: tuning.as_ref(),
        mean_hamming: hamming.as_ref().map(|h| h.iter().sum::<f64>() / h.len() as f64),
        hamming,
    };
    write_json(out, "report.json", &report)
}

fn with_path(e: Error, path: &Path) -> CliError {
    match e {
        Error::Io(source) => CliError::Io { path: path.to_path_buf(), source },
        other => other.into(),
    }
}

#[derive(Serialize)]
struct TuneReport<'a> {
    config: &'a EffectiveConfig,
    tuning: &'a BandwidthScoreTable,
}

pub fn tune(args: &TuneArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let settings = file.estimator(&args.estimator, args.common.seed)?;
    let series = load_series(&args.series).map_err(|e| with_path(e, &args.series))?;
    let table = run_tuner(&SeriesAggregator::new(&series), &settings)?;
    let out = &args.common.out;
    prepare(out)?;
    write(out, "scores.csv", &scores_csv(&table.grid, &table.scores))?;
    let config = EffectiveConfig { estimator: Some(settings), ..Default::default() };
    write_json(out, "report.json", &TuneReport { config: &config, tuning: &table })
}

#[derive(Serialize)]
struct AuditRow {
    t_index: usize,
    window: Vec<usize>,
    z_norm: f64,
    residual: f64,
    relative_residual: f64,
    residual_t_indexed: f64,
}

#[derive(Serialize)]
struct AuditReport<'a> {
    config: &'a EffectiveConfig,
    max_relative_residual: f64,
    rows: Vec<AuditRow>,
}

pub fn audit(args: &AuditArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let scenario = file.scenario(&args.scenario, args.common.seed)?;
    let (series, truth) = generate_scenario(&scenario)?;
    let rows = Execution::Parallel.try_map(series.len(), |t| {
        let a = decomposition_audit(&series, &truth, t, args.r)?;
        Ok::<_, Error>(AuditRow {
            t_index: t + 1,
            window: a.window.iter().map(|s| s + 1).collect(),
            z_norm: a.z_norm,
            residual: a.residual,
            relative_residual: a.relative_residual(),
            residual_t_indexed: a.residual_t_indexed,
        })
    })?;
    let out = &args.common.out;
    prepare(out)?;
    let mut csv = String::from("t_index,z_norm,residual,relative_residual,residual_t_indexed\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{},{},{}", r.t_index, r.z_norm, r.residual, r.relative_residual, r.residual_t_indexed);
    }
    write(out, "audit.csv", &csv)?;
    let config = EffectiveConfig { scenario: Some(scenario), audit_bandwidth: Some(args.r), ..Default::default() };
    let max_relative_residual = rows.iter().map(|r| r.relative_residual).fold(0.0, f64::max);
    write_json(out, "report.json", &AuditReport { config: &config, max_relative_residual, rows })
}

fn experiment_tables(report: &ExperimentReport) -> Vec<(String, String)> {
    let mut files = Vec::new();
    if let Some(panels) = &report.figure3 {
        for (i, p) in panels.iter().enumerate() {
            let scores: Vec<Option<f64>> = p.mean_score.iter().copied().map(Some).collect();
            files.push((format!("figure3_panel{}_scores.csv", i + 1), scores_csv(&p.tuning_grid, &scores)));
            let mut h = String::from("r,hamming\n");
            for (r, v) in p.bandwidths.iter().zip(&p.mean_hamming) {
                let _ = writeln!(h, "{r},{v}");
            }
            files.push((format!("figure3_panel{}_hamming.csv", i + 1), h));
        }
    }
    if let Some(sweep) = &report.sweep {
        let mut s = String::from("value,method,mean_hamming,std_err\n");
        for row in &sweep.rows {
            let _ = writeln!(s, "{},{},{},{}", row.value, row.method.name(), row.mean_hamming, row.std_err);
        }
        files.push(("sweep.csv".into(), s));
    }
    if let Some(rows) = &report.alignability {
        let mut s = String::from("n,T,switch_probability,sequences,non_alignable,fraction,std_err\n");
        for r in rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.n, r.time_points, r.switch_probability, r.sequences, r.non_alignable, r.non_alignable_fraction, r.std_err
            );
        }
        files.push(("alignability.csv".into(), s));
    }
    if let Some(audit) = &report.audit {
        let mut s = String::from("n,T,rho,gamma,t_index,r,z_norm,residual,relative_residual\n");
        for r in &audit.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.n, r.time_points, r.rho, r.gamma, r.t_index, r.bandwidth, r.z_norm, r.residual, r.relative_residual
            );
        }
        files.push(("audit.csv".into(), s));
    }
    files
}

pub fn experiment(args: &ExperimentArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let config = file.experiment(args)?;
    let exec = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let overrides = ExperimentOverrides {
        n: Some(config.n),
        time_points: Some(config.time_points),
        trials: Some(config.trials),
        seed: Some(config.seed),
        adjustment: Some(config.adjustment),
        max_steps: Some(config.max_steps),
        panels: Some(config.panels.clone()),
        values: Some(config.values.clone()),
        fixed: Some(config.fixed),
    };
    let started = Instant::now();
    let mut report = run_experiment(config.preset, &overrides, exec)?;
    if args.timing {
        report.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    }
    let out = &args.common.out;
    prepare(out)?;
    for (name, contents) in experiment_tables(&report) {
        write(out, &name, &contents)?;
    }
    emit_plots(&report, out).map_err(|e| with_path(e, out))?;
    write_json(out, "report.json", &report)
}

#[derive(Serialize)]
struct SummarizeReport<'a> {
    alignable: bool,
    first_failure_t_index: Option<usize>,
    summary: &'a TransitionSummary,
}

pub fn summarize(args: &SummarizeArgs) -> CliResult<()> {
    let seq = load_memberships(&args.memberships, args.k).map_err(|e| with_path(e, &args.memberships))?;
    let certificate = alignable_sequence(&seq)?;
    let summary = summarize_membership_transitions(&seq, args.lag, certificate.alignable)?;
    prepare(&args.out)?;
    write(&args.out, "transitions.csv", &summary.to_csv())?;
    let report = SummarizeReport {
        alignable: certificate.alignable,
        first_failure_t_index: certificate.first_failure.map(|t| t + 1),
        summary: &summary,
    };
    write_json(&args.out, "report.json", &report)
}
