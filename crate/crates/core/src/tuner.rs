//! Data-driven bandwidth selection.
//!
//! For a candidate bandwidth `r` and each time point `t`, the snapshots at
//! or after `t` and those at or before `t`, within distance `c r`, are
//! aggregated separately. The sin-theta distance between the two leading
//! eigenspaces scores how well `r` balances drift (large windows straddle
//! membership changes) against noise (small windows give unstable
//! eigenspaces). The bandwidth with the lowest average score wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{radius_steps, SeriesAggregator};
use crate::exec::Execution;
use crate::network::AdjacencySeries;
use crate::numerics::sin_theta_distance;

/// Whether `t` itself belongs to both half-windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfWindow {
    /// `[t - cr, t]` and `[t, t + cr]`.
    #[default]
    IncludeCenter,
    /// `[t - cr, t)` and `(t, t + cr]`.
    Strict,
}

#[derive(Debug, Clone, Copy)]
pub struct TunerOptions {
    /// Window scaling `c`; half-windows span `c r` on each side.
    pub adjustment: f64,
    pub half_window: HalfWindow,
    pub execution: Execution,
}

impl Default for TunerOptions {
    fn default() -> Self {
        Self { adjustment: 2.0, half_window: HalfWindow::default(), execution: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthScoreTable {
    pub grid: Vec<f64>,
    /// Mean split score per grid point; `None` when every `t` was skipped.
    pub scores: Vec<Option<f64>>,
    pub chosen: f64,
    pub adjustment: f64,
    pub half_window: HalfWindow,
    /// `per_t[i][t]` is the split score of `grid[i]` at time index `t`, or
    /// `None` when a half-window has no snapshot besides `t`.
    pub per_t: Vec<Vec<Option<f64>>>,
}

impl BandwidthScoreTable {
    pub fn chosen_index(&self) -> usize {
        self.grid.iter().position(|&r| r == self.chosen).expect("chosen comes from the grid")
    }
}

/// `{1, ..., floor(T / 3)} / T`, or `{1 / T}` for very short series.
pub fn default_grid(time_points: usize) -> Vec<f64> {
    let top = (time_points / 3).max(1);
    (1..=top).map(|k| k as f64 / time_points as f64).collect()
}

fn check_bandwidth(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tuning bandwidths must be positive, got {r}")))
    }
}

/// The two index ranges compared at `t`, or `None` when one side has no
/// snapshot other than `t`.
pub fn half_windows(
    t: usize,
    r: f64,
    adjustment: f64,
    time_points: usize,
    mode: HalfWindow,
) -> Option<((usize, usize), (usize, usize))> {
    let steps = radius_steps(adjustment * r, time_points);
    if steps == 0 || t == 0 || t + 1 >= time_points {
        return None;
    }
    let lo = t.saturating_sub(steps);
    let hi = (t + steps).min(time_points - 1);
    Some(match mode {
        HalfWindow::IncludeCenter => ((lo, t), (t, hi)),
        HalfWindow::Strict => ((lo, t - 1), (t + 1, hi)),
    })
}

/// Split score at one time index using a shared aggregator.
pub fn split_score_with(
    agg: &SeriesAggregator<'_>,
    t: usize,
    r: f64,
    k: usize,
    options: &TunerOptions,
) -> Result<Option<f64>> {
    check_bandwidth(r)?;
    let time_points = agg.time_points();
    if t >= time_points {
        return Err(Error::invalid(format!("time index {t} outside 0..{time_points}")));
    }
    let Some((left, right)) = half_windows(t, r, options.adjustment, time_points, options.half_window)
    else {
        return Ok(None);
    };
    let before = agg.window_basis(left.0, left.1, k)?;
    let after = agg.window_basis(right.0, right.1, k)?;
    sin_theta_distance(before.vectors.as_ref(), after.vectors.as_ref()).map(Some)
}

/// Split score at 0-based time index `t`; `None` marks a skipped boundary point.
pub fn split_score_at(
    series: &AdjacencySeries,
    t: usize,
    r: f64,
    k: usize,
    adjustment: f64,
) -> Result<Option<f64>> {
    let options = TunerOptions { adjustment, ..Default::default() };
    split_score_with(&SeriesAggregator::new(series), t, r, k, &options)
}

fn per_t_scores(agg: &SeriesAggregator<'_>, r: f64, k: usize, options: &TunerOptions) -> Result<Vec<Option<f64>>> {
    check_bandwidth(r)?;
    options.execution.try_map(agg.time_points(), |t| split_score_with(agg, t, r, k, options))
}

fn mean_of_valid(scores: &[Option<f64>]) -> Option<f64> {
    let valid: Vec<f64> = scores.iter().flatten().copied().collect();
    (!valid.is_empty()).then(|| valid.iter().sum::<f64>() / valid.len() as f64)
}

/// Average split score over the non-skipped time points.
pub fn bandwidth_score(series: &AdjacencySeries, r: f64, k: usize, adjustment: f64) -> Result<f64> {
    let options = TunerOptions { adjustment, ..Default::default() };
    let scores = per_t_scores(&SeriesAggregator::new(series), r, k, &options)?;
    mean_of_valid(&scores)
        .ok_or_else(|| Error::invalid(format!("every time point is skipped at bandwidth {r}")))
}

pub fn tune_bandwidth(series: &AdjacencySeries, grid: &[f64], k: usize, adjustment: f64) -> Result<BandwidthScoreTable> {
    let options = TunerOptions { adjustment, ..Default::default() };
    tune_bandwidth_with(&SeriesAggregator::new(series), grid, k, &options)
}

/// Scores every grid point and picks the minimizer; equal scores go to the
/// smaller bandwidth.
pub fn tune_bandwidth_with(
    agg: &SeriesAggregator<'_>,
    grid: &[f64],
    k: usize,
    options: &TunerOptions,
) -> Result<BandwidthScoreTable> {
    if grid.is_empty() {
        return Err(Error::invalid("bandwidth grid is empty"));
    }
    if !(options.adjustment > 0.0 && options.adjustment.is_finite()) {
        return Err(Error::invalid(format!("adjustment must be positive, got {}", options.adjustment)));
    }
    let per_t = grid.iter().map(|&r| per_t_scores(agg, r, k, options)).collect::<Result<Vec<_>>>()?;
    let scores: Vec<Option<f64>> = per_t.iter().map(|s| mean_of_valid(s)).collect();
    let mut best: Option<(f64, f64)> = None;
    for (&r, score) in grid.iter().zip(&scores) {
        let Some(score) = *score else { continue };
        let better = match best {
            None => true,
            Some((best_r, best_score)) => score < best_score || (score == best_score && r < best_r),
        };
        if better {
            best = Some((r, score));
        }
    }
    let (chosen, _) = best.ok_or_else(|| Error::invalid("every grid bandwidth skips every time point"))?;
    Ok(BandwidthScoreTable {
        grid: grid.to_vec(),
        scores,
        chosen,
        adjustment: options.adjustment,
        half_window: options.half_window,
        per_t,
    })
}

/// Rate-optimal bandwidth `min{c / (sqrt(gamma T) n rho), 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleBandwidth {
    pub value: f64,
    /// Set when `gamma = 0`: with static memberships the widest window is best.
    pub static_memberships: bool,
}

pub fn oracle_bandwidth(gamma: f64, time_points: usize, n: usize, rho: f64, c: f64) -> Result<OracleBandwidth> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
    }
    if time_points == 0 || n == 0 {
        return Err(Error::invalid("T and n must be positive"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid(format!("rho must lie in (0, 1], got {rho}")));
    }
    if gamma == 0.0 {
        return Ok(OracleBandwidth { value: 1.0, static_memberships: true });
    }
    let raw = c / ((gamma * time_points as f64).sqrt() * n as f64 * rho);
    Ok(OracleBandwidth { value: raw.min(1.0), static_memberships: false })
}
