use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use faer::Mat;

use super::kernel::{box_window, KernelKind, KernelSpec};
use crate::error::{Error, Result};
use crate::network::{Adjacency, AdjacencySeries};
use crate::numerics::{spectral_norm, top_k_eigendecomposition, EigenBasis};

/// `A^2 - D`: common-neighbour counts off the diagonal, zero on it.
pub fn debiased_square(a: &Adjacency) -> Mat<f64> {
    let n = a.n();
    let mut z = Mat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = a.common_neighbors(i, j) as f64;
            z[(i, j)] = c;
            z[(j, i)] = c;
        }
    }
    z
}

/// A kernel aggregate at one time point.
#[derive(Debug, Clone)]
pub struct AggregatedMatrix {
    /// 0-based time index.
    pub t: usize,
    pub z: Mat<f64>,
    /// Contributing snapshot indices and their effective weights.
    pub window: Vec<(usize, f64)>,
    pub basis: Option<Arc<EigenBasis>>,
}

impl AggregatedMatrix {
    pub fn basis(&self, k: usize) -> Result<Arc<EigenBasis>> {
        match &self.basis {
            Some(b) if b.k() == k => Ok(Arc::clone(b)),
            _ => top_k_eigendecomposition(self.z.as_ref(), k).map(Arc::new),
        }
    }
}

fn check_time(series: &AdjacencySeries, t: usize) -> Result<()> {
    if t >= series.len() {
        return Err(Error::invalid(format!("time index {t} outside 0..{}", series.len())));
    }
    Ok(())
}

/// Kernel aggregate at 0-based time index `t`, summed directly.
pub fn aggregate(series: &AdjacencySeries, t: usize, kernel: &KernelSpec) -> Result<AggregatedMatrix> {
    kernel.validate()?;
    check_time(series, t)?;
    let n = series.n();
    let mut z = Mat::zeros(n, n);
    let mut window = Vec::new();
    for (s, w) in kernel.weights(t, series.len()) {
        let a = series.snapshot(s);
        let w = match kernel.kind {
            KernelKind::Box => w,
            KernelKind::GaussianOpnorm => {
                let norm = spectral_norm(a.to_dense().as_ref())?;
                if norm == 0.0 {
                    log::warn!("snapshot {s} has no edges; skipped in the gaussian aggregate");
                    continue;
                }
                w / norm
            }
        };
        let sq = debiased_square(a);
        z += &sq * faer::Scale(w);
        window.push((s, w));
    }
    if window.is_empty() {
        return Err(Error::invalid(format!("empty aggregation window at time index {t}")));
    }
    Ok(AggregatedMatrix { t, z, window, basis: None })
}

type BasisKey = (usize, usize, usize);

/// Reusable aggregation state for one series.
///
/// Keeps running sums of the integer debiased squares so that any box window
/// is one subtraction away, and memoizes top-K eigenbases per window. Box
/// windows of the estimator and the half-windows of the bandwidth tuner are
/// both contiguous index ranges, so they share the cache.
pub struct SeriesAggregator<'a> {
    series: &'a AdjacencySeries,
    /// `prefix[t]` is the sum of the first `t` debiased squares (row-major).
    prefix: Vec<Vec<u32>>,
    op_norms: Vec<OnceLock<f64>>,
    cache: Mutex<HashMap<BasisKey, Arc<EigenBasis>>>,
}

impl<'a> SeriesAggregator<'a> {
    pub fn new(series: &'a AdjacencySeries) -> Self {
        let n = series.n();
        let mut prefix = Vec::with_capacity(series.len() + 1);
        prefix.push(vec![0u32; n * n]);
        for a in series.snapshots() {
            let mut next = prefix.last().expect("non-empty").clone();
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = a.common_neighbors(i, j);
                    next[i * n + j] += c;
                    next[j * n + i] += c;
                }
            }
            prefix.push(next);
        }
        let op_norms = (0..series.len()).map(|_| OnceLock::new()).collect();
        Self { series, prefix, op_norms, cache: Mutex::new(HashMap::new()) }
    }

    pub fn series(&self) -> &AdjacencySeries {
        self.series
    }

    pub fn time_points(&self) -> usize {
        self.series.len()
    }

    /// Sum of debiased squares over snapshots `lo..=hi`.
    pub fn window_sum(&self, lo: usize, hi: usize) -> Mat<f64> {
        let n = self.series.n();
        let (upper, lower) = (&self.prefix[hi + 1], &self.prefix[lo]);
        Mat::from_fn(n, n, |i, j| (upper[i * n + j] - lower[i * n + j]) as f64)
    }

    /// Top-K eigenbasis of the window sum over `lo..=hi`, memoized.
    pub fn window_basis(&self, lo: usize, hi: usize, k: usize) -> Result<Arc<EigenBasis>> {
        let key = (lo, hi, k);
        if let Some(b) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(b));
        }
        let basis = Arc::new(top_k_eigendecomposition(self.window_sum(lo, hi).as_ref(), k)?);
        self.cache.lock().expect("cache lock").entry(key).or_insert_with(|| Arc::clone(&basis));
        Ok(basis)
    }

    fn op_norm(&self, s: usize) -> Result<f64> {
        if let Some(v) = self.op_norms[s].get() {
            return Ok(*v);
        }
        let v = spectral_norm(self.series.snapshot(s).to_dense().as_ref())?;
        Ok(*self.op_norms[s].get_or_init(|| v))
    }

    pub fn aggregate(&self, t: usize, kernel: &KernelSpec) -> Result<AggregatedMatrix> {
        kernel.validate()?;
        check_time(self.series, t)?;
        match kernel.kind {
            KernelKind::Box => {
                let range = box_window(t, kernel.bandwidth, self.time_points());
                let (lo, hi) = (*range.start(), *range.end());
                Ok(AggregatedMatrix {
                    t,
                    z: self.window_sum(lo, hi),
                    window: range.map(|s| (s, 1.0)).collect(),
                    basis: None,
                })
            }
            KernelKind::GaussianOpnorm => {
                let n = self.series.n();
                let mut acc = vec![0.0f64; n * n];
                let mut window = Vec::new();
                for (s, w) in kernel.weights(t, self.time_points()) {
                    let norm = self.op_norm(s)?;
                    if norm == 0.0 {
                        log::warn!("snapshot {s} has no edges; skipped in the gaussian aggregate");
                        continue;
                    }
                    let w = w / norm;
                    let (upper, lower) = (&self.prefix[s + 1], &self.prefix[s]);
                    for ((a, u), l) in acc.iter_mut().zip(upper).zip(lower) {
                        *a += w * (u - l) as f64;
                    }
                    window.push((s, w));
                }
                if window.is_empty() {
                    return Err(Error::invalid(format!("empty aggregation window at time index {t}")));
                }
                Ok(AggregatedMatrix { t, z: Mat::from_fn(n, n, |i, j| acc[i * n + j]), window, basis: None })
            }
        }
    }

    /// Top-K eigenbasis of the kernel aggregate at `t`.
    pub fn basis(&self, t: usize, kernel: &KernelSpec, k: usize) -> Result<Arc<EigenBasis>> {
        match kernel.kind {
            KernelKind::Box => {
                kernel.validate()?;
                check_time(self.series, t)?;
                let range = box_window(t, kernel.bandwidth, self.time_points());
                self.window_basis(*range.start(), *range.end(), k)
            }
            KernelKind::GaussianOpnorm => self.aggregate(t, kernel)?.basis(k),
        }
    }
}
