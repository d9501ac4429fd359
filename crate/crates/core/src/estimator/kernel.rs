use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// Equal weights on every snapshot within distance `r` of `t`.
    Box,
    /// Weights `exp(-(t - s)^2 / r^2) / ||A^(s)||_op` over the whole grid.
    GaussianOpnorm,
}

/// Temporal smoothing kernel and its bandwidth `r` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn boxcar(bandwidth: f64) -> Self {
        Self { kind: KernelKind::Box, bandwidth }
    }

    pub fn gaussian(bandwidth: f64) -> Self {
        Self { kind: KernelKind::GaussianOpnorm, bandwidth }
    }

    /// One snapshot per time point.
    pub fn singleton() -> Self {
        Self::boxcar(0.0)
    }

    /// Every snapshot, equally weighted.
    pub fn all() -> Self {
        Self::boxcar(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.bandwidth) {
            Ok(())
        } else {
            Err(Error::invalid(format!("bandwidth must lie in [0, 1], got {}", self.bandwidth)))
        }
    }

    /// Snapshot indices and weights contributing at time index `t`.
    ///
    /// Gaussian weights here exclude the operator-norm normalization, which
    /// depends on the data. Weights below `1e-12` are dropped.
    pub fn weights(&self, t: usize, time_points: usize) -> Vec<(usize, f64)> {
        match self.kind {
            KernelKind::Box => {
                box_window(t, self.bandwidth, time_points).map(|s| (s, 1.0)).collect()
            }
            KernelKind::GaussianOpnorm => {
                if self.bandwidth == 0.0 {
                    return vec![(t, 1.0)];
                }
                let r2 = self.bandwidth * self.bandwidth;
                (0..time_points)
                    .filter_map(|s| {
                        let d = (s as f64 - t as f64) / time_points as f64;
                        let w = (-d * d / r2).exp();
                        (w >= 1e-12).then_some((s, w))
                    })
                    .collect()
            }
        }
    }
}

/// Number of grid steps covered by a bandwidth: `floor(r T)` up to rounding.
pub fn radius_steps(r: f64, time_points: usize) -> usize {
    (r * time_points as f64 + 1e-9).floor().max(0.0) as usize
}

/// Indices of the grid points within distance `r` of the 0-based index `t`.
pub fn box_window(t: usize, r: f64, time_points: usize) -> RangeInclusive<usize> {
    let steps = radius_steps(r, time_points);
    t.saturating_sub(steps)..=(t + steps).min(time_points - 1)
}
