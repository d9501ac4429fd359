//! Community memberships and label-alignment metrics.
//!
//! Labels are 1-based (`1..=K`) everywhere they cross a public boundary.
//! Membership rows are plain `&[usize]` slices; [`MembershipSequence`] adds
//! the time axis and validates its rows once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linear_assignment_max;

/// Checks that every label lies in `1..=k`.
pub fn validate_labels(row: &[usize], k: usize) -> Result<()> {
    match row.iter().position(|&l| l == 0 || l > k) {
        Some(index) => Err(Error::LabelOutOfRange { label: row[index], index, k }),
        None => Ok(()),
    }
}

fn check_pair(a: &[usize], b: &[usize], k: usize) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: b.len() });
    }
    validate_labels(a, k)?;
    validate_labels(b, k)
}

/// Community labels of `n` nodes at `T` time points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipSequence {
    n: usize,
    k: usize,
    labels: Vec<Vec<usize>>,
}

impl MembershipSequence {
    pub fn new(k: usize, labels: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("K must be positive"));
        }
        let n = labels.first().map_or(0, Vec::len);
        for row in &labels {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, actual: row.len() });
            }
            validate_labels(row, k)?;
        }
        Ok(Self { n, k, labels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels at time index `t` (0-based position on the grid).
    pub fn row(&self, t: usize) -> &[usize] {
        &self.labels[t]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.labels
    }

    /// One-hot `n x K` view of row `t`.
    pub fn one_hot(&self, t: usize) -> faer::Mat<f64> {
        let row = &self.labels[t];
        faer::Mat::from_fn(self.n, self.k, |i, c| if row[i] == c + 1 { 1.0 } else { 0.0 })
    }

    pub fn counts(&self, t: usize) -> CommunityCounts {
        CommunityCounts::of(&self.labels[t], self.k)
    }
}

/// Number of nodes in each community.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityCounts {
    pub sizes: Vec<usize>,
}

impl CommunityCounts {
    /// Assumes `row` is already validated against `k`.
    pub fn of(row: &[usize], k: usize) -> Self {
        let mut sizes = vec![0; k];
        row.iter().for_each(|&l| sizes[l - 1] += 1);
        Self { sizes }
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn min(&self) -> usize {
        self.sizes.iter().copied().min().unwrap_or(0)
    }
}

/// `counts[a - 1][b - 1]` is the number of nodes labeled `a` in the first
/// membership and `b` in the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn transpose(&self) -> Self {
        let k = self.k();
        Self { counts: (0..k).map(|a| (0..k).map(|b| self.counts[b][a]).collect()).collect() }
    }

    /// Columns reordered so that column `k` holds the old column `perm.target(k)`,
    /// i.e. the product `C R` for the permutation matrix of `perm`.
    pub fn permute_columns(&self, perm: &Permutation) -> Self {
        let k = self.k();
        Self {
            counts: (0..k)
                .map(|a| (0..k).map(|b| self.counts[a][perm.target(b)]).collect())
                .collect(),
        }
    }

    pub fn trace(&self) -> u64 {
        (0..self.k()).map(|a| self.counts[a][a]).sum()
    }

    pub fn as_f64(&self) -> Vec<Vec<f64>> {
        self.counts.iter().map(|r| r.iter().map(|&c| c as f64).collect()).collect()
    }

    pub fn is_diagonally_dominant(&self) -> bool {
        is_diagonally_dominant(&self.as_f64())
    }
}

/// A bijection on `{0, ..., K-1}` (community `k + 1` maps to `target(k) + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    targets: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Self { targets: (0..k).collect() }
    }

    pub fn from_targets(targets: Vec<usize>) -> Result<Self> {
        let k = targets.len();
        let mut seen = vec![false; k];
        for &t in &targets {
            if t >= k || seen[t] {
                return Err(Error::invalid(format!("{targets:?} is not a permutation")));
            }
            seen[t] = true;
        }
        Ok(Self { targets })
    }

    pub fn k(&self) -> usize {
        self.targets.len()
    }

    /// 0-based target of 0-based index `k`.
    pub fn target(&self, k: usize) -> usize {
        self.targets[k]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.k()];
        for (k, &t) in self.targets.iter().enumerate() {
            inv[t] = k;
        }
        Self { targets: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.targets.iter().enumerate().all(|(k, &t)| k == t)
    }

    /// The 1-based image of 1-based label `label`.
    pub fn apply(&self, label: usize) -> usize {
        self.targets[label - 1] + 1
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.targets.iter().map(|t| t + 1).collect()
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(one_based: Vec<usize>) -> Result<Self> {
        if one_based.contains(&0) {
            return Err(Error::invalid("permutation entries are 1-based"));
        }
        Self::from_targets(one_based.into_iter().map(|t| t - 1).collect())
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.to_one_based()
    }
}

pub fn confusion_matrix(a: &[usize], b: &[usize], k: usize) -> Result<ConfusionMatrix> {
    check_pair(a, b, k)?;
    let mut counts = vec![vec![0u64; k]; k];
    for (&x, &y) in a.iter().zip(b) {
        counts[x - 1][y - 1] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Column permutation maximizing the trace of `C R` (ties: lexicographically smallest).
pub fn optimal_permutation(c: &ConfusionMatrix) -> Permutation {
    linear_assignment_max(&c.as_f64())
        .expect("confusion matrices are square with finite entries")
        .permutation
}

/// Fraction of nodes mislabeled after the best relabeling of `b`.
pub fn hamming_error(a: &[usize], b: &[usize], k: usize) -> Result<f64> {
    let c = confusion_matrix(a, b, k)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let r = optimal_permutation(&c);
    let matched = c.permute_columns(&r).trace();
    Ok(1.0 - matched as f64 / a.len() as f64)
}

/// `X_kk >= sum_{l != k} |X_kl|` for every row (non-strict).
pub fn is_diagonally_dominant(x: &[Vec<f64>]) -> bool {
    x.iter().enumerate().all(|(k, row)| {
        let off: f64 = row.iter().enumerate().filter(|&(l, _)| l != k).map(|(_, v)| v.abs()).sum();
        row[k] >= off
    })
}

/// Both raw confusion matrices `C(a, b)` and `C(b, a)` are diagonally dominant.
///
/// No relabeling is applied: the check is on the given label order.
pub fn alignable_pair(a: &[usize], b: &[usize], k: usize) -> Result<bool> {
    let c = confusion_matrix(a, b, k)?;
    Ok(c.is_diagonally_dominant() && c.transpose().is_diagonally_dominant())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceAlignability {
    pub alignable: bool,
    /// 0-based index `t` of the first pair `(t, t + 1)` that is not alignable.
    pub first_failure: Option<usize>,
}

pub fn alignable_sequence(seq: &MembershipSequence) -> Result<SequenceAlignability> {
    if seq.len() < 2 {
        return Err(Error::invalid("alignability needs at least two time points"));
    }
    for t in 0..seq.len() - 1 {
        if !alignable_pair(seq.row(t), seq.row(t + 1), seq.k())? {
            return Ok(SequenceAlignability { alignable: false, first_failure: Some(t) });
        }
    }
    Ok(SequenceAlignability { alignable: true, first_failure: None })
}

/// Number of nodes whose label differs between the two rows.
pub fn changed_nodes(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Sufficient condition for [`alignable_pair`]: `||M - M'||_0 < min_k n_k`,
/// where the `L0` norm counts nonzero entries of the one-hot difference
/// (two per relabeled node) and `n_k` are the community sizes in `a`.
pub fn deterministic_alignability_condition(a: &[usize], b: &[usize], k: usize) -> Result<bool> {
    check_pair(a, b, k)?;
    let one_hot_l0 = 2 * changed_nodes(a, b);
    Ok(one_hot_l0 < CommunityCounts::of(a, k).min())
}
