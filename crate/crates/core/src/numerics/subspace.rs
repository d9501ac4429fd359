use faer::MatRef;

use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-6;

/// Largest entry of `|U^T U - I|`.
pub fn max_orthonormality_defect(u: MatRef<'_, f64>) -> f64 {
    let gram = u.transpose() * u;
    let k = gram.nrows();
    let mut worst = 0.0f64;
    for j in 0..k {
        for i in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Frobenius sin-theta distance `sqrt(K - ||U^T V||_F^2)` between the column
/// spaces of two n x K orthonormal matrices. Lies in `[0, sqrt(K)]`.
pub fn sin_theta_distance(u: MatRef<'_, f64>, v: MatRef<'_, f64>) -> Result<f64> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::matrix(format!(
            "subspace shapes differ: {}x{} vs {}x{}",
            u.nrows(),
            u.ncols(),
            v.nrows(),
            v.ncols()
        )));
    }
    for (name, m) in [("U", u), ("V", v)] {
        let defect = max_orthonormality_defect(m);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::matrix(format!(
                "{name} is not column-orthonormal (defect {defect:.3e})"
            )));
        }
    }
    let k = u.ncols() as f64;
    let overlap = (u.transpose() * v).squared_norm_l2();
    let radicand = k - overlap;
    Ok(radicand.max(0.0).sqrt().min(k.sqrt()))
}
