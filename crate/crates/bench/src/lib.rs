//! Shared fixtures for the benchmarks.

use modeforest::synthetic::catalog_mixture;
use modeforest::PointSet;

/// `n` draws from the two-mode catalog density, fixed seed.
pub fn two_mode_samples(n: usize) -> PointSet {
    catalog_mixture("two-gaussian-10sep")
        .expect("catalog entry exists")
        .sample(n, 1)
}

/// `n` draws from the planar two-mode catalog density, fixed seed.
pub fn planar_samples(n: usize) -> PointSet {
    catalog_mixture("planar-pair")
        .expect("catalog entry exists")
        .sample(n, 1)
}
