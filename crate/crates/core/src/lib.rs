//! Community detection and tracking in time-varying networks.
//!
//! The estimator aggregates debiased squared adjacency matrices inside a
//! temporal kernel window, runs spectral clustering at every observed time
//! point, and aligns the per-time labels with a maximum-weight assignment so
//! that communities can be followed across time. Squaring before aggregation
//! makes the signal positive semidefinite, so heterophilic connectivity
//! (between-community edges denser than within-community edges) is handled
//! the same way as homophilic connectivity.
//!
//! Module map:
//!
//! * [`model`]: memberships, confusion matrices, label alignment metrics.
//! * [`numerics`]: eigensolver, k-means, linear assignment, subspace distance.
//! * [`network`] and [`simulator`]: adjacency snapshots and the dynamic SBM generator.
//! * [`estimator`]: kernel aggregation, spectral clustering, temporal alignment,
//!   and the bias-variance decomposition audit.
//! * [`tuner`]: split-window bandwidth selection.
//! * [`io`], [`experiment`], [`report`], [`plot`]: file formats and experiment suites.

pub mod error;
pub mod estimator;
pub mod exec;
pub mod experiment;
pub mod io;
pub mod model;
pub mod network;
pub mod numerics;
pub mod plot;
pub mod report;
pub mod rng;
pub mod simulator;
pub mod tuner;

pub use error::{Error, Result};

pub use model::{ConfusionMatrix, MembershipSequence, Permutation};
pub use network::{Adjacency, AdjacencySeries};
pub use simulator::{generate_scenario, GroundTruth, ScenarioConfig};

pub use estimator::{kd_sos, DynamicClustering, KernelSpec};
pub use tuner::{tune_bandwidth, BandwidthScoreTable};
