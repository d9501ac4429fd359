//! The kernel-smoothed debiased sum-of-squares estimator.
//!
//! For each observed time point the debiased squares `A^2 - D` of the
//! snapshots inside a temporal kernel window are summed, the top-K
//! eigenvectors of the sum are clustered with k-means, and the per-time labels
//! are chained together with maximum-overlap relabeling.

mod aggregate;
mod audit;
mod cluster;
mod kernel;

pub use aggregate::{aggregate, debiased_square, AggregatedMatrix, SeriesAggregator};
pub use audit::{decomposition_audit, DecompositionAudit, DecompositionTerms};
pub use cluster::{align_sequence, cluster_time_point, kd_sos, kd_sos_with, DynamicClustering};
pub use kernel::{box_window, radius_steps, KernelKind, KernelSpec};
