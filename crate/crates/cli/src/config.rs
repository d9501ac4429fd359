//! JSON configuration files and their merge with command-line flags.
//!
//! Precedence, highest first: flags, the matching config block, the
//! top-level `seed`, built-in defaults.

use std::fs;
use std::path::Path;

use kdsos::estimator::KernelKind;
use kdsos::experiment::{ExperimentConfig, ExperimentOverrides, Preset};
use kdsos::simulator::{stationary_markov_transition, ConnectivitySchedule, Matrix, Process};
use kdsos::tuner::HalfWindow;
use kdsos::ScenarioConfig;
use serde::{Deserialize, Serialize};

use crate::args::{EstimatorFlags, ExperimentArgs, KernelArg, ScenarioFlags};
use crate::error::{io_err, CliError, CliResult};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub scenario: ScenarioPatch,
    pub estimator: EstimatorPatch,
    pub experiment: ExperimentPatch,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioPatch {
    pub n: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "T")]
    pub time_points: Option<usize>,
    pub gamma: Option<f64>,
    pub rho: Option<f64>,
    pub process: Option<Process>,
    pub transition: Option<Matrix>,
    pub initial_sizes: Option<Vec<usize>>,
    pub connectivity: Option<ConnectivitySchedule>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorPatch {
    pub k: Option<usize>,
    pub kernel: Option<KernelKind>,
    pub r: Option<f64>,
    pub tune: Option<bool>,
    pub grid: Option<Vec<f64>>,
    pub adjust: Option<f64>,
    pub half_window: Option<HalfWindow>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct ExperimentPatch {
    pub preset: Option<String>,
    #[serde(flatten)]
    pub overrides: ExperimentOverrides,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn scenario(&self, flags: &ScenarioFlags, seed: Option<u64>) -> CliResult<ScenarioConfig> {
        let p = &self.scenario;
        let seed = seed.or(p.seed).or(self.seed).unwrap_or(DEFAULT_SEED);
        let gamma = flags.gamma.or(p.gamma).unwrap_or(0.01);
        let rho = flags.rho.or(p.rho).unwrap_or(0.3);
        let mut s = ScenarioConfig::reference(0.0, rho, seed)?;
        s.gamma = gamma;
        if let Some(n) = flags.n.or(p.n) {
            s = s.with_nodes(n);
        }
        if let Some(sizes) = &p.initial_sizes {
            s.initial_sizes = sizes.clone();
            s.k = sizes.len();
            s.n = flags.n.or(p.n).unwrap_or(sizes.iter().sum());
        }
        if let Some(k) = p.k {
            s.k = k;
        }
        if let Some(t) = flags.time_points.or(p.time_points) {
            s.time_points = t;
        }
        if let Some(process) = p.process {
            s.process = process;
        }
        if let Some(c) = &p.connectivity {
            s.connectivity = c.clone();
        }
        s.transition = match &p.transition {
            Some(m) => Some(m.clone()),
            None if s.k == 3 && s.process == Process::Bernoulli => Some(stationary_markov_transition(gamma)?),
            None => None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn estimator(&self, flags: &EstimatorFlags, seed: Option<u64>) -> CliResult<EstimatorSettings> {
        let p = &self.estimator;
        let k = flags
            .k
            .or(p.k)
            .or(self.scenario.k)
            .ok_or_else(|| CliError::Config("number of communities required (--k)".into()))?;
        let kernel = match flags.kernel {
            Some(KernelArg::Box) => KernelKind::Box,
            Some(KernelArg::Gaussian) => KernelKind::GaussianOpnorm,
            None => p.kernel.unwrap_or(KernelKind::Box),
        };
        let half_window = if flags.strict_half_windows {
            HalfWindow::Strict
        } else {
            p.half_window.unwrap_or_default()
        };
        Ok(EstimatorSettings {
            k,
            kernel,
            bandwidth: flags.r.or(p.r),
            tune: flags.tune || p.tune.unwrap_or(false),
            grid: flags.grid.clone().or_else(|| p.grid.clone()),
            adjustment: flags.adjust.or(p.adjust).unwrap_or(2.0),
            half_window,
            seed: seed.or(p.seed).or(self.seed).unwrap_or(DEFAULT_SEED),
        })
    }

    pub fn experiment(&self, args: &ExperimentArgs) -> CliResult<ExperimentConfig> {
        let name = args
            .preset
            .as_deref()
            .or(self.experiment.preset.as_deref())
            .ok_or_else(|| CliError::Config("experiment preset required (--preset)".into()))?;
        let preset: Preset = name.parse()?;
        let mut o = self.experiment.overrides.clone();
        o.seed = args.common.seed.or(o.seed).or(self.seed);
        o.n = args.n.or(o.n);
        o.time_points = args.time_points.or(o.time_points);
        o.trials = args.trials.or(o.trials);
        o.adjustment = args.adjust.or(o.adjustment);
        o.values = args.values.clone().or(o.values);
        o.max_steps = args.max_steps.or(o.max_steps);
        Ok(ExperimentConfig::resolve(preset, &o)?)
    }
}

/// Resolved estimator and tuner settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSettings {
    pub k: usize,
    pub kernel: KernelKind,
    /// Fixed bandwidth; ignored when `tune` is set.
    pub bandwidth: Option<f64>,
    pub tune: bool,
    pub grid: Option<Vec<f64>>,
    pub adjustment: f64,
    pub half_window: HalfWindow,
    pub seed: u64,
}

/// Settings echoed into every report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EffectiveConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit_bandwidth: Option<f64>,
}
