//! Preset simulation suites.
//!
//! Every preset resolves to an [`ExperimentConfig`] (echoed into the report)
//! and runs its trials through [`Execution`]. Trial `i` uses the seed
//! `derive_seed(master, [STREAM_TRIAL, i])` at every sweep point, so sweeps
//! compare methods and parameter values on common random numbers and partial
//! re-runs reproduce the same trials.

use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::estimator::{decomposition_audit, kd_sos_with, DynamicClustering, KernelSpec, SeriesAggregator};
use crate::exec::Execution;
use crate::model::{alignable_sequence, hamming_error, MembershipSequence};
use crate::rng::{derive_seed, stream, STREAM_TRIAL};
use crate::simulator::{
    generate_scenario, simulate_memberships_bernoulli, uniform_switching_transition, ConnectivitySchedule,
    Process, ScenarioConfig,
};
use crate::tuner::{default_grid, tune_bandwidth_with, TunerOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Figure3,
    Figure4Gamma,
    Figure4Rho,
    Alignability,
    Audit,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "figure3" => Ok(Preset::Figure3),
            "figure4_gamma" => Ok(Preset::Figure4Gamma),
            "figure4_rho" => Ok(Preset::Figure4Rho),
            "alignability" => Ok(Preset::Alignability),
            "audit" => Ok(Preset::Audit),
            other => Err(Error::invalid(format!("unknown preset {other:?}"))),
        }
    }
}

/// Optional knobs layered over a preset's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentOverrides {
    pub n: Option<usize>,
    #[serde(rename = "T")]
    pub time_points: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub adjustment: Option<f64>,
    /// Largest bandwidth, in grid steps, of the figure-3 curves.
    pub max_steps: Option<usize>,
    /// `(gamma, rho)` pairs for figure 3.
    pub panels: Option<Vec<(f64, f64)>>,
    /// Sweep values for the figure-4 presets.
    pub values: Option<Vec<f64>>,
    /// Fixed parameter of the figure-4 sweeps (`rho` for the gamma sweep and vice versa).
    pub fixed: Option<f64>,
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub n: usize,
    #[serde(rename = "T")]
    pub time_points: usize,
    pub trials: usize,
    pub seed: u64,
    pub adjustment: f64,
    pub max_steps: usize,
    pub panels: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub fixed: f64,
}

impl ExperimentConfig {
    pub fn resolve(preset: Preset, o: &ExperimentOverrides) -> Result<Self> {
        let (n, time_points, trials) = match preset {
            Preset::Figure3 => (500, 50, 25),
            Preset::Figure4Gamma | Preset::Figure4Rho => (500, 50, 50),
            Preset::Alignability => (100, 10, 200),
            Preset::Audit => (40, 8, 100),
        };
        let (values, fixed) = match preset {
            Preset::Figure4Gamma => ((0..=10).map(|i| i as f64 / 100.0).collect(), 0.5),
            Preset::Figure4Rho => ((2..=10).map(|i| i as f64 / 10.0).collect(), 0.05),
            Preset::Alignability => (vec![0.3, 0.5, 0.6, 0.7, 0.8], 0.0),
            _ => (Vec::new(), 0.0),
        };
        let config = Self {
            preset,
            n: o.n.unwrap_or(n),
            time_points: o.time_points.unwrap_or(time_points),
            trials: o.trials.unwrap_or(trials),
            seed: o.seed.unwrap_or(20240611),
            adjustment: o.adjustment.unwrap_or(2.0),
            max_steps: o.max_steps.unwrap_or(15.min(o.time_points.unwrap_or(time_points).saturating_sub(1))),
            panels: o.panels.clone().unwrap_or_else(|| vec![(0.01, 0.3), (0.05, 0.3), (0.01, 0.5)]),
            values: o.values.clone().unwrap_or(values),
            fixed: o.fixed.unwrap_or(fixed),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 || self.time_points < 2 || self.trials == 0 {
            return Err(Error::invalid("experiments need n >= 3, T >= 2 and at least one trial"));
        }
        if self.adjustment.is_nan() || self.adjustment <= 0.0 {
            return Err(Error::invalid("adjustment must be positive"));
        }
        if self.preset == Preset::Figure3 && (self.max_steps == 0 || self.max_steps >= self.time_points) {
            return Err(Error::invalid("max_steps must lie in 1..T"));
        }
        if matches!(self.preset, Preset::Figure4Gamma | Preset::Figure4Rho | Preset::Alignability)
            && self.values.is_empty()
        {
            return Err(Error::invalid("sweep has no values"));
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.seed, &[STREAM_TRIAL, trial as u64])
    }

    /// The reference scenario rescaled to this experiment's `n` and `T`.
    pub fn scenario(&self, gamma: f64, rho: f64, trial: usize) -> Result<ScenarioConfig> {
        let mut s = ScenarioConfig::reference(gamma, rho, self.trial_seed(trial))?.with_nodes(self.n);
        s.time_points = self.time_points;
        Ok(s)
    }
}

/// Mean Hamming error over time points against the true memberships.
pub fn mean_hamming(estimate: &DynamicClustering, truth: &MembershipSequence) -> Result<f64> {
    let t_count = truth.len();
    let mut total = 0.0;
    for t in 0..t_count {
        total += hamming_error(estimate.aligned.row(t), truth.row(t), truth.k())?;
    }
    Ok(total / t_count as f64)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_err(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

fn argmin(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
        .0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure3Panel {
    pub gamma: f64,
    pub rho: f64,
    /// `{0, 1, ..., max_steps} / T`.
    pub bandwidths: Vec<f64>,
    pub mean_hamming: Vec<f64>,
    /// `{1, ..., max_steps} / T`.
    pub tuning_grid: Vec<f64>,
    pub mean_score: Vec<f64>,
    /// Bandwidth minimizing the mean Hamming curve.
    pub hamming_minimizer: f64,
    /// Bandwidth minimizing the mean score curve.
    pub tuner_choice: f64,
    /// Per-trial tuner choices.
    pub trial_choices: Vec<f64>,
    /// `trial_hamming[i][j]`: trial `i` at `bandwidths[j]`.
    pub trial_hamming: Vec<Vec<f64>>,
    pub trial_scores: Vec<Vec<f64>>,
}

impl Figure3Panel {
    pub fn hamming_minimizer_step(&self) -> usize {
        argmin(&self.mean_hamming)
    }

    /// Tuner choice in grid steps (the tuning grid starts at one step).
    pub fn tuner_choice_step(&self) -> usize {
        argmin(&self.mean_score) + 1
    }
}

struct Figure3Trial {
    hamming: Vec<f64>,
    scores: Vec<f64>,
    choice: f64,
}

fn figure3_trial(config: &ExperimentConfig, gamma: f64, rho: f64, trial: usize) -> Result<Figure3Trial> {
    let scenario = config.scenario(gamma, rho, trial)?;
    let (series, truth) = generate_scenario(&scenario)?;
    let agg = SeriesAggregator::new(&series);
    let t_count = config.time_points as f64;
    let hamming = (0..=config.max_steps)
        .map(|step| {
            let kernel = KernelSpec::boxcar(step as f64 / t_count);
            let est = kd_sos_with(&agg, scenario.k, &kernel, scenario.seed, Execution::Sequential)?;
            mean_hamming(&est, &truth.memberships)
        })
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<f64> = (1..=config.max_steps).map(|s| s as f64 / t_count).collect();
    let options =
        TunerOptions { adjustment: config.adjustment, execution: Execution::Sequential, ..Default::default() };
    let table = tune_bandwidth_with(&agg, &grid, scenario.k, &options)?;
    let scores = table
        .scores
        .iter()
        .map(|s| s.ok_or_else(|| Error::invalid("tuning grid point skipped every time point")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Figure3Trial { hamming, scores, choice: table.chosen })
}

pub fn run_figure3_panel(config: &ExperimentConfig, gamma: f64, rho: f64, exec: Execution) -> Result<Figure3Panel> {
    let trials = exec.try_map(config.trials, |i| figure3_trial(config, gamma, rho, i))?;
    let t_count = config.time_points as f64;
    let bandwidths: Vec<f64> = (0..=config.max_steps).map(|s| s as f64 / t_count).collect();
    let tuning_grid: Vec<f64> = bandwidths[1..].to_vec();
    let column_mean = |rows: &[Vec<f64>], j: usize| mean(&rows.iter().map(|r| r[j]).collect::<Vec<_>>());
    let trial_hamming: Vec<Vec<f64>> = trials.iter().map(|t| t.hamming.clone()).collect();
    let trial_scores: Vec<Vec<f64>> = trials.iter().map(|t| t.scores.clone()).collect();
    let mean_hamming: Vec<f64> = (0..bandwidths.len()).map(|j| column_mean(&trial_hamming, j)).collect();
    let mean_score: Vec<f64> = (0..tuning_grid.len()).map(|j| column_mean(&trial_scores, j)).collect();
    Ok(Figure3Panel {
        gamma,
        rho,
        hamming_minimizer: bandwidths[argmin(&mean_hamming)],
        tuner_choice: tuning_grid[argmin(&mean_score)],
        bandwidths,
        mean_hamming,
        tuning_grid,
        mean_score,
        trial_choices: trials.iter().map(|t| t.choice).collect(),
        trial_hamming,
        trial_scores,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Kdsos,
    Singleton,
    All,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Kdsos, Method::Singleton, Method::All];

    pub fn name(self) -> &'static str {
        match self {
            Method::Kdsos => "kdsos",
            Method::Singleton => "singleton",
            Method::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Gamma,
    Rho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: Method,
    pub value: f64,
    pub mean_hamming: f64,
    pub std_err: f64,
    pub trial_hamming: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub fixed: f64,
    pub rows: Vec<ComparisonRow>,
    /// Bandwidths chosen by the tuner for `kdsos`, `[value][trial]`.
    pub chosen_bandwidths: Vec<Vec<f64>>,
}

impl SweepReport {
    pub fn curve(&self, method: Method) -> Vec<f64> {
        self.rows.iter().filter(|r| r.method == method).map(|r| r.mean_hamming).collect()
    }
}

/// Errors of the three methods on one generated instance, plus the tuned bandwidth.
pub fn compare_methods(scenario: &ScenarioConfig, methods: &[Method], adjustment: f64) -> Result<(Vec<f64>, f64)> {
    let (series, truth) = generate_scenario(scenario)?;
    let agg = SeriesAggregator::new(&series);
    let mut chosen = f64::NAN;
    let mut out = Vec::with_capacity(methods.len());
    for &method in methods {
        let kernel = match method {
            Method::Singleton => KernelSpec::singleton(),
            Method::All => KernelSpec::all(),
            Method::Kdsos => {
                let options = TunerOptions { adjustment, execution: Execution::Sequential, ..Default::default() };
                let table = tune_bandwidth_with(&agg, &default_grid(series.len()), scenario.k, &options)?;
                chosen = table.chosen;
                KernelSpec::boxcar(table.chosen)
            }
        };
        let est = kd_sos_with(&agg, scenario.k, &kernel, scenario.seed, Execution::Sequential)?;
        out.push(mean_hamming(&est, &truth.memberships)?);
    }
    Ok((out, chosen))
}

pub fn run_sweep(config: &ExperimentConfig, parameter: SweepParameter, methods: &[Method], exec: Execution) -> Result<SweepReport> {
    let mut rows = Vec::new();
    let mut chosen_bandwidths = Vec::new();
    for &value in &config.values {
        let (gamma, rho) = match parameter {
            SweepParameter::Gamma => (value, config.fixed),
            SweepParameter::Rho => (config.fixed, value),
        };
        let trials = exec.try_map(config.trials, |i| compare_methods(&config.scenario(gamma, rho, i)?, methods, config.adjustment))?;
        for (m, &method) in methods.iter().enumerate() {
            let trial_hamming: Vec<f64> = trials.iter().map(|(h, _)| h[m]).collect();
            rows.push(ComparisonRow {
                method,
                value,
                mean_hamming: mean(&trial_hamming),
                std_err: std_err(&trial_hamming),
                trial_hamming,
            });
        }
        if methods.contains(&Method::Kdsos) {
            chosen_bandwidths.push(trials.iter().map(|(_, c)| *c).collect());
        }
    }
    Ok(SweepReport { parameter, values: config.values.clone(), fixed: config.fixed, rows, chosen_bandwidths })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignabilityRow {
    pub n: usize,
    #[serde(rename = "T")]
    pub time_points: usize,
    /// Per-interval switching probability `gamma / T`.
    pub switch_probability: f64,
    pub sequences: usize,
    pub non_alignable: usize,
    pub non_alignable_fraction: f64,
    pub std_err: f64,
}

/// Fraction of two-community Bernoulli membership sequences (equal initial
/// sizes) that fail the alignability check.
pub fn alignability_rate(
    n: usize,
    time_points: usize,
    switch_probability: f64,
    sequences: usize,
    seed: u64,
    exec: Execution,
) -> Result<AlignabilityRow> {
    let transition = uniform_switching_transition(2, switch_probability)?;
    let half = n / 2;
    let failures = exec.try_map(sequences, |i| {
        let config = ScenarioConfig {
            n,
            k: 2,
            time_points,
            gamma: switch_probability * time_points as f64,
            rho: 0.0,
            process: Process::Bernoulli,
            transition: Some(transition.clone()),
            initial_sizes: vec![half, n - half],
            connectivity: ConnectivitySchedule::constant(vec![vec![0.0; 2]; 2]),
            seed: derive_seed(seed, &[STREAM_TRIAL, i as u64]),
        };
        let m = simulate_memberships_bernoulli(&config)?;
        Ok::<_, Error>(!alignable_sequence(&m)?.alignable)
    })?;
    let non_alignable = failures.iter().filter(|&&f| f).count();
    let p = non_alignable as f64 / sequences as f64;
    Ok(AlignabilityRow {
        n,
        time_points,
        switch_probability,
        sequences,
        non_alignable,
        non_alignable_fraction: p,
        std_err: (p * (1.0 - p) / sequences as f64).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub n: usize,
    #[serde(rename = "T")]
    pub time_points: usize,
    pub rho: f64,
    pub gamma: f64,
    pub t_index: usize,
    pub bandwidth: f64,
    pub z_norm: f64,
    pub residual: f64,
    pub relative_residual: f64,
    pub residual_t_indexed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub max_relative_residual: f64,
}

/// One random audit instance: `n <= max_n`, `T <= max_t`, random density,
/// switching rate, time point and grid bandwidth.
pub fn audit_instance(max_n: usize, max_t: usize, seed: u64) -> Result<AuditRow> {
    let mut rng = stream(seed, &[STREAM_TRIAL]);
    let k = rng.random_range(2..=3usize);
    let n = rng.random_range((3 * k).max(6)..=max_n.max(3 * k));
    let time_points = rng.random_range(2..=max_t.max(2));
    let rho = rng.random_range(0.2..=1.0);
    let gamma = rng.random_range(0.0..=time_points as f64 * 0.3);
    let sizes = crate::simulator::proportional_sizes(&vec![1; k], n);
    let b: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 0.8 } else { 0.3 }).collect())
        .collect();
    let scenario = ScenarioConfig {
        n,
        k,
        time_points,
        gamma,
        rho,
        process: Process::Bernoulli,
        transition: None,
        initial_sizes: sizes,
        connectivity: ConnectivitySchedule::constant(b),
        seed,
    };
    let (series, truth) = generate_scenario(&scenario)?;
    let t = rng.random_range(0..time_points);
    let step = rng.random_range(0..=time_points);
    let bandwidth = step as f64 / time_points as f64;
    let audit = decomposition_audit(&series, &truth, t, bandwidth)?;
    Ok(AuditRow {
        n,
        time_points,
        rho,
        gamma,
        t_index: t + 1,
        bandwidth,
        z_norm: audit.z_norm,
        residual: audit.residual,
        relative_residual: audit.relative_residual(),
        residual_t_indexed: audit.residual_t_indexed,
    })
}

pub fn run_audit(config: &ExperimentConfig, exec: Execution) -> Result<AuditReport> {
    let rows = exec.try_map(config.trials, |i| audit_instance(config.n, config.time_points, config.trial_seed(i)))?;
    let max_relative_residual = rows.iter().map(|r| r.relative_residual).fold(0.0, f64::max);
    Ok(AuditReport { rows, max_relative_residual })
}

/// Spearman rank correlation and its two-sided p-value (t approximation).
pub fn spearman(x: &[f64], y: &[f64]) -> (f64, f64) {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            (i..=j).for_each(|p| r[idx[p]] = avg);
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean(&rx), mean(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    let rho = if vx > 0.0 && vy > 0.0 { cov / (vx * vy).sqrt() } else { 0.0 };
    let df = x.len() as f64 - 2.0;
    if df <= 0.0 {
        return (rho, 1.0);
    }
    if rho.abs() >= 1.0 {
        return (rho, 0.0);
    }
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (rho, 2.0 * (1.0 - dist.cdf(t.abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure3: Option<Vec<Figure3Panel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignability: Option<Vec<AlignabilityRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
    /// Wall-clock seconds; only filled on request since it breaks byte-for-byte
    /// reproducibility of the report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl ExperimentReport {
    /// Checks that every reported Hamming error lies in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let mut values: Vec<f64> = Vec::new();
        if let Some(panels) = &self.figure3 {
            for p in panels {
                values.extend(&p.mean_hamming);
                values.extend(p.trial_hamming.iter().flatten());
            }
        }
        if let Some(s) = &self.sweep {
            for r in &s.rows {
                values.push(r.mean_hamming);
                values.extend(&r.trial_hamming);
            }
        }
        match values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            Some(v) => Err(Error::invalid(format!("Hamming error {v} outside [0, 1]"))),
            None => Ok(()),
        }
    }
}

/// Runs a preset end to end.
pub fn run_experiment(preset: Preset, overrides: &ExperimentOverrides, exec: Execution) -> Result<ExperimentReport> {
    let config = ExperimentConfig::resolve(preset, overrides)?;
    let mut report = ExperimentReport {
        config: config.clone(),
        figure3: None,
        sweep: None,
        alignability: None,
        audit: None,
        elapsed_seconds: None,
    };
    match preset {
        Preset::Figure3 => {
            let panels = config
                .panels
                .iter()
                .map(|&(gamma, rho)| run_figure3_panel(&config, gamma, rho, exec))
                .collect::<Result<Vec<_>>>()?;
            report.figure3 = Some(panels);
        }
        Preset::Figure4Gamma => report.sweep = Some(run_sweep(&config, SweepParameter::Gamma, &Method::ALL, exec)?),
        Preset::Figure4Rho => report.sweep = Some(run_sweep(&config, SweepParameter::Rho, &Method::ALL, exec)?),
        Preset::Alignability => {
            let rows = config
                .values
                .iter()
                .map(|&p| alignability_rate(config.n, config.time_points, p, config.trials, config.seed, exec))
                .collect::<Result<Vec<_>>>()?;
            report.alignability = Some(rows);
        }
        Preset::Audit => report.audit = Some(run_audit(&config, exec)?),
    }
    report.validate()?;
    Ok(report)
}
