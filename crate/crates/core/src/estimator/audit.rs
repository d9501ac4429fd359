use faer::Mat;

use super::kernel::box_window;
use crate::error::{Error, Result};
use crate::network::AdjacencySeries;
use crate::simulator::GroundTruth;

/// The five terms of the bias-variance decomposition of a box-window
/// aggregate `sum_s (A_s^2 - D_s)` around time `t`:
///
/// * I: membership-drift bias, `sum_s Q_s^2 - Pi Q_s^2 Pi`
/// * II: diagonal bias, `sum_s diag(Q_s)^2 - Q_s diag(Q_s) - diag(Q_s) Q_s`
/// * III: first-order noise, `sum_s X_s P_s + P_s X_s`
/// * IV: second-order noise, `sum_s X_s^2 - D_s`
/// * V: signal, `sum_s Pi Q_s^2 Pi`
///
/// where `Pi` projects onto the column space of the membership matrix at `t`
/// and the noise is `X_s = A_s - P_s`.
#[derive(Debug, Clone)]
pub struct DecompositionTerms {
    pub term_i: Mat<f64>,
    pub term_ii: Mat<f64>,
    pub term_iii: Mat<f64>,
    pub term_iv: Mat<f64>,
    pub term_v: Mat<f64>,
    pub pi: Mat<f64>,
    /// `X_s` for each `s` in the window, in window order.
    pub noise: Vec<Mat<f64>>,
}

#[derive(Debug, Clone)]
pub struct DecompositionAudit {
    pub terms: DecompositionTerms,
    pub window: Vec<usize>,
    /// `sum_s A_s^2 - D_s`.
    pub z: Mat<f64>,
    pub z_norm: f64,
    /// `||I + II + III + IV + V - Z||_F`.
    pub residual: f64,
    /// Same residual with term II built from `Q_t` at every `s` instead of `Q_s`.
    pub residual_t_indexed: f64,
}

impl DecompositionAudit {
    /// Residual relative to `||Z||_F` (absolute when `Z = 0`).
    pub fn relative_residual(&self) -> f64 {
        if self.z_norm > 0.0 {
            self.residual / self.z_norm
        } else {
            self.residual
        }
    }
}

/// Projection `M (M^T M)^+ M^T` for a membership row; empty communities drop out.
fn projection(labels: &[usize], k: usize) -> Mat<f64> {
    let mut sizes = vec![0usize; k];
    labels.iter().for_each(|&l| sizes[l - 1] += 1);
    let n = labels.len();
    Mat::from_fn(n, n, |i, j| {
        if labels[i] == labels[j] {
            1.0 / sizes[labels[i] - 1] as f64
        } else {
            0.0
        }
    })
}

fn diagonal_part(m: &Mat<f64>) -> Mat<f64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| if i == j { m[(i, i)] } else { 0.0 })
}

fn diagonal_bias(q: &Mat<f64>) -> Mat<f64> {
    let g = diagonal_part(q);
    &g * &g - q * &g - &g * q
}

/// Evaluates every term at 0-based time index `t` for box bandwidth `r`.
pub fn decomposition_audit(
    series: &AdjacencySeries,
    truth: &GroundTruth,
    t: usize,
    r: f64,
) -> Result<DecompositionAudit> {
    let time_points = series.len();
    if truth.memberships.len() != time_points || truth.memberships.n() != series.n() {
        return Err(Error::invalid("ground truth does not match the series"));
    }
    if t >= time_points {
        return Err(Error::invalid(format!("time index {t} outside 0..{time_points}")));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::invalid(format!("bandwidth must lie in [0, 1], got {r}")));
    }
    let n = series.n();
    let pi = projection(truth.memberships.row(t), truth.memberships.k());
    let (q_t, _) = truth.probability_matrices(t)?;
    let diag_bias_t = diagonal_bias(&q_t);

    let zero = || Mat::<f64>::zeros(n, n);
    let (mut term_i, mut term_ii, mut term_ii_t) = (zero(), zero(), zero());
    let (mut term_iii, mut term_iv, mut term_v, mut z) = (zero(), zero(), zero(), zero());
    let mut noise = Vec::new();
    let window: Vec<usize> = box_window(t, r, time_points).collect();

    for &s in &window {
        let (q, p) = truth.probability_matrices(s)?;
        let snapshot = series.snapshot(s);
        let a = snapshot.to_dense();
        let d = Mat::from_fn(n, n, |i, j| if i == j { snapshot.degree(i) as f64 } else { 0.0 });
        let x = &a - &p;

        let q2 = &q * &q;
        let projected = &pi * &q2 * &pi;
        term_i += &q2 - &projected;
        term_v += &projected;
        term_ii += diagonal_bias(&q);
        term_ii_t += &diag_bias_t;
        term_iii += &x * &p + &p * &x;
        term_iv += &x * &x - &d;
        z += &a * &a - &d;
        noise.push(x);
    }

    let shared = &term_i + &term_iii + &term_iv + &term_v;
    let residual = (&shared + &term_ii - &z).norm_l2();
    let residual_t_indexed = (&shared + &term_ii_t - &z).norm_l2();
    let z_norm = z.norm_l2();
    Ok(DecompositionAudit {
        terms: DecompositionTerms { term_i, term_ii, term_iii, term_iv, term_v, pi, noise },
        window,
        z,
        z_norm,
        residual,
        residual_t_indexed,
    })
}
