use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Leading eigenpairs of a real symmetric matrix.
///
/// `values` are in descending algebraic order and `vectors` holds the
/// matching orthonormal eigenvectors as columns. Signs (and, for repeated
/// eigenvalues, the basis within the eigenspace) are not canonicalized.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
    /// Set when the K-th and (K+1)-th eigenvalues coincide, so the leading
    /// K-dimensional invariant subspace is not unique.
    pub degenerate_gap: bool,
}

impl EigenBasis {
    pub fn k(&self) -> usize {
        self.values.len()
    }
}

const SYMMETRY_TOL: f64 = 1e-9;

fn check_symmetric(s: MatRef<'_, f64>) -> Result<()> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::matrix(format!("expected a square matrix, got {}x{}", n, s.ncols())));
    }
    let mut scale = 1.0f64;
    for j in 0..n {
        for i in 0..n {
            let x = s[(i, j)];
            if !x.is_finite() {
                return Err(Error::matrix("matrix has non-finite entries"));
            }
            scale = scale.max(x.abs());
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            if (s[(i, j)] - s[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::matrix(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    s[(i, j)],
                    s[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

/// The `k` algebraically largest eigenpairs of the symmetric matrix `s`.
///
/// Runs a dense full decomposition and truncates.
pub fn top_k_eigendecomposition(s: MatRef<'_, f64>, k: usize) -> Result<EigenBasis> {
    check_symmetric(s)?;
    let n = s.nrows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("K must lie in 1..={n}, got {k}")));
    }
    let evd = s.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NonConvergence)?;
    // faer returns ascending eigenvalues
    let ascending = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<f64> = (0..k).map(|j| ascending[n - 1 - j]).collect();
    let vectors = Mat::from_fn(n, k, |i, j| u[(i, n - 1 - j)]);

    let degenerate_gap = if k < n {
        let next = ascending[n - 1 - k];
        let scale = ascending[n - 1].abs().max(ascending[0].abs()).max(1.0);
        (values[k - 1] - next).abs() <= 1e-10 * scale
    } else {
        false
    };
    if degenerate_gap {
        log::warn!("eigenvalue {k} is repeated; the leading invariant subspace is not unique");
    }
    Ok(EigenBasis { values, vectors, degenerate_gap })
}

pub fn full_eigendecomposition(s: MatRef<'_, f64>) -> Result<EigenBasis> {
    top_k_eigendecomposition(s, s.nrows())
}

/// Operator norm of a symmetric matrix: the largest eigenvalue magnitude.
pub fn spectral_norm(s: MatRef<'_, f64>) -> Result<f64> {
    check_symmetric(s)?;
    if s.nrows() == 0 {
        return Ok(0.0);
    }
    let values = s.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NonConvergence)?;
    Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}
