//! Dense numerical kernels shared by the estimator and the tuner.

mod assignment;
mod eigen;
mod kmeans;
mod subspace;

pub use assignment::{linear_assignment_max, Assignment};
pub use eigen::{full_eigendecomposition, spectral_norm, top_k_eigendecomposition, EigenBasis};
pub use kmeans::{kmeans, kmeans_with, KMeansConfig, KMeansResult};
pub use subspace::{max_orthonormality_defect, sin_theta_distance};
