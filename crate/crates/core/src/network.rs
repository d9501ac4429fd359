//! Undirected simple graphs on a fixed node set, stored as bit-packed rows.

use faer::Mat;

use crate::error::{Error, Result};

/// Symmetric binary adjacency matrix with zero diagonal.
///
/// Row `i` is a bitset of `ceil(n / 64)` words. Mutators keep the matrix
/// symmetric and refuse self-loops, so every value is a valid snapshot.
#[derive(Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Adjacency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Adjacency").field("n", &self.n).field("edges", &self.edge_count()).finish()
    }
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self { n, words, bits: vec![0; n * words] }
    }

    pub fn complete(n: usize) -> Self {
        let mut a = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                a.set(i, j);
            }
        }
        a
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut a = Self::empty(n);
        for (i, j) in edges {
            a.add_edge(i, j)?;
        }
        Ok(a)
    }

    /// Builds from a dense 0/1 matrix, validating symmetry and the zero diagonal.
    pub fn from_dense(m: faer::MatRef<'_, f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::matrix("adjacency must be square"));
        }
        let mut a = Self::empty(n);
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::matrix(format!("self-loop at node {i}")));
            }
            for j in (i + 1)..n {
                let (x, y) = (m[(i, j)], m[(j, i)]);
                if x != y {
                    return Err(Error::matrix(format!("adjacency not symmetric at ({i}, {j})")));
                }
                match x {
                    0.0 => {}
                    1.0 => a.set(i, j),
                    _ => return Err(Error::matrix(format!("adjacency entry {x} is not binary"))),
                }
            }
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
    }

    /// Adds edge `{i, j}`; repeated insertions are idempotent.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::invalid(format!("edge ({i}, {j}) out of range for n={}", self.n)));
        }
        if i == j {
            return Err(Error::matrix(format!("self-loop at node {i}")));
        }
        self.set(i, j);
        Ok(())
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    /// Number of common neighbours of `i` and `j`, i.e. `(A^2)_{ij}`.
    #[inline]
    pub fn common_neighbors(&self, i: usize, j: usize) -> u32 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |i, j| if self.has_edge(i, j) { 1.0 } else { 0.0 })
    }

    /// Applies a node relabeling: node `i` becomes node `perm[i]`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Self {
        let mut out = Self::empty(self.n);
        for (i, j) in self.edges() {
            out.set(perm[i], perm[j]);
        }
        out
    }
}

/// `T` adjacency snapshots on a shared node set, observed at times `1/T, ..., 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencySeries {
    n: usize,
    snapshots: Vec<Adjacency>,
}

impl AdjacencySeries {
    pub fn new(snapshots: Vec<Adjacency>) -> Result<Self> {
        let Some(first) = snapshots.first() else {
            return Err(Error::invalid("a series needs at least one snapshot"));
        };
        let n = first.n();
        if let Some(bad) = snapshots.iter().find(|a| a.n() != n) {
            return Err(Error::LengthMismatch { expected: n, actual: bad.n() });
        }
        Ok(Self { n, snapshots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of time points `T`.
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshot(&self, t: usize) -> &Adjacency {
        &self.snapshots[t]
    }

    pub fn snapshots(&self) -> &[Adjacency] {
        &self.snapshots
    }

    /// Observation time of the 0-based index `t`.
    pub fn time(&self, t: usize) -> f64 {
        (t + 1) as f64 / self.len() as f64
    }

    pub fn permute_nodes(&self, perm: &[usize]) -> Self {
        Self { n: self.n, snapshots: self.snapshots.iter().map(|a| a.permute_nodes(perm)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_invariants() {
        let mut a = Adjacency::empty(70);
        a.add_edge(0, 69).unwrap();
        a.add_edge(69, 0).unwrap();
        a.add_edge(3, 5).unwrap();
        assert!(a.has_edge(69, 0) && a.has_edge(0, 69));
        assert_eq!(a.edge_count(), 2);
        assert_eq!(a.degree(0), 1);
        assert!(a.add_edge(4, 4).is_err());
        assert!(a.add_edge(70, 1).is_err());
        assert_eq!(a.edges().collect::<Vec<_>>(), vec![(0, 69), (3, 5)]);
    }

    #[test]
    fn dense_round_trip() {
        let a = Adjacency::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let b = Adjacency::from_dense(a.to_dense().as_ref()).unwrap();
        assert_eq!(a, b);
        let bad = Mat::from_fn(2, 2, |i, j| if i == 0 && j == 1 { 1.0 } else { 0.0 });
        assert!(Adjacency::from_dense(bad.as_ref()).is_err());
    }

    #[test]
    fn common_neighbors_match_square() {
        let a = Adjacency::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let d = a.to_dense();
        let sq = &d * &d;
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a.common_neighbors(i, j) as f64, sq[(i, j)]);
            }
        }
    }
}
