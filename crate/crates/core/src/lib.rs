//! Quick Shift mode seeking.
//!
//! The pipeline starts from a kernel density estimate over a sample set
//! ([`kernels`]), links every sample to its nearest neighbour of strictly
//! higher estimated density within a segmentation radius `tau`
//! ([`quickshift`]), and reads mode estimates off the roots of the resulting
//! forest. On top of the forest the crate builds a level-set cluster tree
//! ([`cluster_tree`]) and a conditional-mode estimator ([`modal_regression`]).
//!
//! [`verify`] holds brute-force reference implementations of every fast path,
//! [`synthetic`] ships analytic ground-truth densities and [`experiments`]
//! runs the statistical acceptance suite built from both.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cluster_tree;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod modal_regression;
pub mod points;
pub mod quickshift;
pub mod report;
pub mod spatial;
pub mod synthetic;
pub mod verify;

pub use analysis::{hausdorff, match_modes, MatchReport, SeparationCertificate};
pub use cluster_tree::{cluster_tree, link, ClusterTree, LevelComponents, MergeHeight};
pub use error::{Error, Result};
pub use kernels::{
    kde_evaluate, kde_self_evaluate, recommended_bandwidth, DensityModel, Kernel, KernelShape,
};
pub use modal_regression::{modal_regression, modal_regression_batch, ConditionalModeResult};
pub use points::PointSet;
pub use quickshift::{
    assignments, build_forest, directed_path_exists, modes, quickshift, tau_schedule, ModeSet,
    QuickShiftForest,
};
pub use synthetic::MixtureDensity;
