use faer::MatRef;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::{stream, STREAM_KMEANS};

/// Restart and iteration budget for [`kmeans_with`].
#[derive(Debug, Clone, Copy)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub execution: Execution,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iter: 100, execution: Execution::default() }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// 1-based cluster labels.
    pub labels: Vec<usize>,
    /// Within-cluster sum of squares.
    pub wcss: f64,
    /// `k` centroids, each of the row dimension.
    pub centroids: Vec<Vec<f64>>,
}

/// k-means with the default configuration; returns 1-based labels.
pub fn kmeans(rows: MatRef<'_, f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    kmeans_with(rows, k, seed, &KMeansConfig::default()).map(|r| r.labels)
}

/// Best of `config.restarts` runs of Lloyd's algorithm from k-means++ seeds.
///
/// Restart `i` draws from its own stream derived from `(seed, i)`, and the
/// winner is the lowest WCSS with ties going to the lower restart index, so
/// the result does not depend on how restarts are scheduled.
pub fn kmeans_with(
    rows: MatRef<'_, f64>,
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<KMeansResult> {
    let n = rows.nrows();
    let dim = rows.ncols();
    if k == 0 {
        return Err(Error::invalid("k-means needs at least one cluster"));
    }
    if n < k {
        return Err(Error::invalid(format!("k-means needs n >= K, got n={n}, K={k}")));
    }
    let points = Points {
        data: (0..n).flat_map(|i| (0..dim).map(move |j| rows[(i, j)])).collect(),
        dim,
    };
    if points.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("k-means input has non-finite entries"));
    }
    if k == 1 {
        let centroid = points.mean_of(&vec![0; n], 1).remove(0);
        let wcss = (0..n).map(|i| sq_dist(points.row(i), &centroid)).sum();
        return Ok(KMeansResult { labels: vec![1; n], wcss, centroids: vec![centroid] });
    }

    let restarts = config.restarts.max(1);
    let runs = config.execution.map(restarts, |r| {
        let mut rng = stream(seed, &[STREAM_KMEANS, r as u64]);
        lloyd(&points, k, config.max_iter, &mut rng)
    });
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.wcss.total_cmp(&b.wcss).then(ia.cmp(ib)))
        .map(|(_, r)| r)
        .expect("at least one restart");
    Ok(best)
}

struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    fn len(&self) -> usize {
        self.data.len() / self.dim.max(1)
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn mean_of(&self, assign: &[usize], k: usize) -> Vec<Vec<f64>> {
        let mut sums = vec![vec![0.0; self.dim]; k];
        let mut counts = vec![0usize; k];
        for (i, &c) in assign.iter().enumerate() {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(self.row(i)) {
                *s += x;
            }
        }
        for (s, &c) in sums.iter_mut().zip(&counts) {
            if c > 0 {
                s.iter_mut().for_each(|x| *x /= c as f64);
            }
        }
        sums
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init<R: Rng>(points: &Points, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points.row(rng.random_range(0..n)).to_vec()];
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = points.row(pick).to_vec();
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd<R: Rng>(points: &Points, k: usize, max_iter: usize, rng: &mut R) -> KMeansResult {
    let n = points.len();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut assign: Vec<usize> = (0..n).map(|i| nearest(points.row(i), &centroids).0).collect();

    for _ in 0..max_iter {
        centroids = points.mean_of(&assign, k);
        reseed_empty(points, &mut assign, &mut centroids, k);
        let next: Vec<usize> = (0..n).map(|i| nearest(points.row(i), &centroids).0).collect();
        if next == assign {
            break;
        }
        assign = next;
    }
    centroids = points.mean_of(&assign, k);
    reseed_empty(points, &mut assign, &mut centroids, k);
    centroids = points.mean_of(&assign, k);
    let wcss = (0..n).map(|i| sq_dist(points.row(i), &centroids[assign[i]])).sum();
    KMeansResult { labels: assign.iter().map(|&c| c + 1).collect(), wcss, centroids }
}

/// Moves the point farthest from its centroid into each empty cluster.
fn reseed_empty(points: &Points, assign: &mut [usize], centroids: &mut [Vec<f64>], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        assign.iter().for_each(|&c| counts[c] += 1);
        let Some(empty) = counts.iter().position(|&c| c == 0) else { return };
        let far = (0..assign.len())
            .filter(|&i| counts[assign[i]] > 1)
            .max_by(|&a, &b| {
                let da = sq_dist(points.row(a), &centroids[assign[a]]);
                let db = sq_dist(points.row(b), &centroids[assign[b]]);
                da.total_cmp(&db).then(b.cmp(&a))
            });
        let Some(far) = far else { return };
        let old = assign[far];
        assign[far] = empty;
        centroids[empty] = points.row(far).to_vec();
        let refreshed = points.mean_of(assign, k);
        centroids[old] = refreshed[old].clone();
    }
}
