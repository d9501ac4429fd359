use serde::{Deserialize, Serialize};

use super::aggregate::{AggregatedMatrix, SeriesAggregator};
use super::kernel::KernelSpec;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{confusion_matrix, optimal_permutation, ConfusionMatrix, MembershipSequence, Permutation};
use crate::network::AdjacencySeries;
use crate::numerics::kmeans;
use crate::rng::{derive_seed, STREAM_CLUSTER};

/// Per-time estimates chained into a label-consistent sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicClustering {
    /// k-means labels per time point, before alignment.
    pub raw: Vec<Vec<usize>>,
    pub aligned: MembershipSequence,
    /// `permutations[t]` matches aligned labels at `t` (rows) to raw labels at
    /// `t + 1` (columns).
    pub permutations: Vec<Permutation>,
    /// `confusions[t] = C(aligned[t], raw[t + 1])`.
    pub confusions: Vec<ConfusionMatrix>,
    /// Every aligned confusion `C R` and its transpose is diagonally dominant.
    pub alignable: bool,
    /// Top-K eigenvalues per time point (empty when labels did not come from
    /// a spectral step).
    #[serde(default)]
    pub eigenvalues: Vec<Vec<f64>>,
    /// Time indices whose K-th eigenvalue was repeated.
    #[serde(default)]
    pub degenerate_gaps: Vec<usize>,
}

/// Spectral clustering of one aggregate: k-means on the rows of its top-K eigenvectors.
pub fn cluster_time_point(z: &AggregatedMatrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    let basis = z.basis(k)?;
    kmeans(basis.vectors.as_ref(), k, seed)
}

/// Relabels each time point to agree with the previous aligned one.
///
/// The first time point keeps its raw labels. For each later point the raw
/// labels are permuted by the maximum-overlap assignment against the aligned
/// labels just before it.
pub fn align_sequence(raw: &[Vec<usize>], k: usize) -> Result<DynamicClustering> {
    let Some(first) = raw.first() else {
        return Err(Error::invalid("alignment needs at least one time point"));
    };
    let mut aligned = vec![first.clone()];
    let mut permutations = Vec::with_capacity(raw.len().saturating_sub(1));
    let mut confusions = Vec::with_capacity(raw.len().saturating_sub(1));
    let mut alignable = true;
    for next in &raw[1..] {
        let prev = aligned.last().expect("non-empty");
        let c = confusion_matrix(prev, next, k)?;
        let r = optimal_permutation(&c);
        let rotated = c.permute_columns(&r);
        alignable &= rotated.is_diagonally_dominant() && rotated.transpose().is_diagonally_dominant();
        let back = r.inverse();
        aligned.push(next.iter().map(|&l| back.apply(l)).collect());
        permutations.push(r);
        confusions.push(c);
    }
    Ok(DynamicClustering {
        raw: raw.to_vec(),
        aligned: MembershipSequence::new(k, aligned)?,
        permutations,
        confusions,
        alignable,
        eigenvalues: Vec::new(),
        degenerate_gaps: Vec::new(),
    })
}

/// Runs the estimator on every time point with a fresh aggregator.
pub fn kd_sos(series: &AdjacencySeries, k: usize, kernel: &KernelSpec, seed: u64) -> Result<DynamicClustering> {
    let agg = SeriesAggregator::new(series);
    kd_sos_with(&agg, k, kernel, seed, Execution::default())
}

/// Runs the estimator against a shared aggregator.
///
/// Time point `t` clusters with seed `derive_seed(seed, [STREAM_CLUSTER, t])`,
/// so the result does not depend on `exec`.
pub fn kd_sos_with(
    agg: &SeriesAggregator<'_>,
    k: usize,
    kernel: &KernelSpec,
    seed: u64,
    exec: Execution,
) -> Result<DynamicClustering> {
    kernel.validate()?;
    let n = agg.series().n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("K must lie in 1..={n}, got {k}")));
    }
    let per_t = exec.try_map(agg.time_points(), |t| {
        let basis = agg.basis(t, kernel, k)?;
        let labels = kmeans(basis.vectors.as_ref(), k, derive_seed(seed, &[STREAM_CLUSTER, t as u64]))?;
        Ok::<_, Error>((labels, basis.values.clone(), basis.degenerate_gap))
    })?;
    let raw: Vec<Vec<usize>> = per_t.iter().map(|(l, _, _)| l.clone()).collect();
    let mut out = align_sequence(&raw, k)?;
    out.degenerate_gaps = per_t.iter().enumerate().filter(|(_, p)| p.2).map(|(t, _)| t).collect();
    out.eigenvalues = per_t.into_iter().map(|(_, v, _)| v).collect();
    Ok(out)
}
