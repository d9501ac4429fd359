use crate::error::{Error, Result};
use crate::model::Permutation;

/// Solution of a trace-maximizing assignment problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Row `k` is matched to column `permutation.target(k)`.
    pub permutation: Permutation,
    pub value: f64,
}

/// Maximizes `sum_k weights[k][perm(k)]` over all permutations.
///
/// The optimum is computed with the shortest-augmenting-path Hungarian
/// method. When several permutations attain it, the lexicographically
/// smallest `(perm(0), perm(1), ...)` is returned: rows are fixed one at a
/// time to the smallest column that still admits an optimal completion.
pub fn linear_assignment_max(weights: &[Vec<f64>]) -> Result<Assignment> {
    let k = weights.len();
    for (i, row) in weights.iter().enumerate() {
        if row.len() != k {
            return Err(Error::matrix(format!(
                "assignment weights must be square: row {i} has {} entries, expected {k}",
                row.len()
            )));
        }
        if row.iter().any(|w| !w.is_finite()) {
            return Err(Error::matrix("assignment weights must be finite"));
        }
    }
    if k == 0 {
        return Ok(Assignment { permutation: Permutation::identity(0), value: 0.0 });
    }

    let rows: Vec<usize> = (0..k).collect();
    let cols: Vec<usize> = (0..k).collect();
    let best = max_value(weights, &rows, &cols);
    let scale = weights.iter().flatten().fold(0.0f64, |m, w| m.max(w.abs()));
    let tol = 1e-12 * (1.0 + scale * k as f64);

    let mut target = vec![usize::MAX; k];
    let mut free: Vec<usize> = cols;
    let mut fixed = 0.0;
    for row in 0..k {
        let rest: Vec<usize> = (row + 1..k).collect();
        let mut chosen = None;
        for (pos, &col) in free.iter().enumerate() {
            let others: Vec<usize> =
                free.iter().copied().filter(|&c| c != col).collect();
            let candidate = fixed + weights[row][col] + max_value(weights, &rest, &others);
            if candidate >= best - tol {
                chosen = Some(pos);
                break;
            }
        }
        // the optimum is always completable, so some column qualifies; fall back to
        // the first free one only if rounding defeats the tolerance
        let pos = chosen.unwrap_or(0);
        let col = free.remove(pos);
        target[row] = col;
        fixed += weights[row][col];
    }

    let permutation = Permutation::from_targets(target)?;
    let value = (0..k).map(|r| weights[r][permutation.target(r)]).sum();
    Ok(Assignment { permutation, value })
}

/// Optimal value of the assignment restricted to `rows` x `cols` (equal sizes).
fn max_value(weights: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    debug_assert_eq!(rows.len(), cols.len());
    if rows.is_empty() {
        return 0.0;
    }
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| -weights[r][c]).collect())
        .collect();
    let assign = hungarian_min(&cost);
    assign
        .iter()
        .enumerate()
        .map(|(i, &j)| weights[rows[i]][cols[j]])
        .sum()
}

/// O(n^3) Hungarian algorithm with potentials; returns row -> column.
fn hungarian_min(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[j]: row (1-based) matched to column j; column 0 is the virtual source
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    row_to_col
}
