//! Quick Shift forest construction.
//!
//! Each sample `i` gets a directed edge to the nearest sample of strictly
//! higher density, provided some strictly-higher sample lies within distance
//! `tau` (inclusive). Samples without such a neighbour are roots; the roots
//! are the mode estimates and the trees are the clusters.
//!
//! Ties between equidistant candidates go to the lowest sample index. Equal
//! densities never produce an edge, so coincident samples with equal density
//! stay in separate trees.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{kde_self_evaluate, DensityModel};
use crate::points::{distance, PointSet};
use crate::spatial::GridIndex;

/// How `build_forest` finds each sample's parent. Every strategy returns the
/// same forest bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborSearch {
    /// Grid index when `tau` is finite, brute force otherwise.
    #[default]
    Auto,
    /// Scan all samples for every sample.
    BruteForce,
    /// Uniform grid with cell size `tau`; only candidates in the `tau`-ball
    /// are examined. Falls back to brute force for infinite `tau`.
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuickShiftForest {
    parent: Vec<Option<usize>>,
    density: Vec<f64>,
    edge_length: Vec<Option<f64>>,
    tau: f64,
}

impl QuickShiftForest {
    /// Rebuilds a forest from its parent links, e.g. after deserialization.
    ///
    /// Checks structure (lengths, index range, strict density increase along
    /// edges, edge lengths within `tau`) but not that each parent is the
    /// nearest higher-density sample; see [`crate::verify::check_forest`].
    pub fn from_parents(
        samples: &PointSet,
        density: Vec<f64>,
        parent: Vec<Option<usize>>,
        tau: f64,
    ) -> Result<Self> {
        check_tau(tau)?;
        let n = samples.len();
        for (what, len) in [("density", density.len()), ("parent list", parent.len())] {
            if len != n {
                return Err(Error::LengthMismatch {
                    what,
                    expected: n,
                    found: len,
                });
            }
        }
        let mut edge_length = Vec::with_capacity(n);
        for (i, p) in parent.iter().enumerate() {
            edge_length.push(match *p {
                None => None,
                Some(j) if j >= n => return Err(Error::IndexOutOfRange { index: j, len: n }),
                Some(j) => {
                    let len = distance(samples.row(i), samples.row(j));
                    if !(density[j] > density[i]) || len > tau {
                        return Err(Error::InvalidParameter(format!(
                            "edge {i} -> {j} is not a valid Quick Shift edge"
                        )));
                    }
                    Some(len)
                }
            });
        }
        Ok(Self {
            parent,
            density,
            edge_length,
            tau,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn edge_length(&self, i: usize) -> Option<f64> {
        self.edge_length[i]
    }

    pub fn is_root(&self, i: usize) -> bool {
        self.parent[i].is_none()
    }

    /// Root indices in ascending order.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_root(i)).collect()
    }
}

/// Mode estimates: the forest roots and their coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub indices: Vec<usize>,
    pub coordinates: PointSet,
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn build_forest(samples: &PointSet, density: &[f64], tau: f64) -> Result<QuickShiftForest> {
    build_forest_with(samples, density, tau, NeighborSearch::Auto)
}

pub fn build_forest_with(
    samples: &PointSet,
    density: &[f64],
    tau: f64,
    search: NeighborSearch,
) -> Result<QuickShiftForest> {
    check_tau(tau)?;
    if density.len() != samples.len() {
        return Err(Error::LengthMismatch {
            what: "density",
            expected: samples.len(),
            found: density.len(),
        });
    }
    if density.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("density contains NaN".into()));
    }
    let n = samples.len();
    let use_grid = match search {
        NeighborSearch::BruteForce => false,
        NeighborSearch::Auto | NeighborSearch::Grid => tau.is_finite(),
    };

    let links: Vec<Option<(usize, f64)>> = if use_grid {
        let index = GridIndex::new(samples, tau);
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = None;
                index.for_each_within(samples.row(i), tau, |j, dist| {
                    if density[j] > density[i] {
                        consider(&mut best, j, dist);
                    }
                });
                best
            })
            .collect()
    } else {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = samples.row(i);
                let mut best = None;
                for j in 0..n {
                    if density[j] > density[i] {
                        consider(&mut best, j, distance(xi, samples.row(j)));
                    }
                }
                best.filter(|&(_, dist)| dist <= tau)
            })
            .collect()
    };

    let (parent, edge_length) = links
        .into_iter()
        .map(|link| (link.map(|(j, _)| j), link.map(|(_, d)| d)))
        .unzip();
    Ok(QuickShiftForest {
        parent,
        density: density.to_vec(),
        edge_length,
        tau,
    })
}

/// Nearest wins; equal distances go to the lower index.
#[inline]
fn consider(best: &mut Option<(usize, f64)>, j: usize, dist: f64) {
    match *best {
        Some((bj, bd)) if bd < dist || (bd == dist && bj < j) => {}
        _ => *best = Some((j, dist)),
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTau(tau))
    }
}

/// Quick Shift with densities from the exact KDE of `samples`.
pub fn quickshift(samples: &PointSet, model: &DensityModel, tau: f64) -> Result<QuickShiftForest> {
    check_tau(tau)?;
    let density = kde_self_evaluate(model, samples)?;
    build_forest(samples, &density, tau)
}

pub fn modes(forest: &QuickShiftForest, samples: &PointSet) -> ModeSet {
    let indices = forest.roots();
    let coordinates = samples.select(&indices);
    ModeSet {
        indices,
        coordinates,
    }
}

/// The root reached from each sample by following parent links.
pub fn assignments(forest: &QuickShiftForest) -> Vec<usize> {
    const UNSET: usize = usize::MAX;
    let n = forest.len();
    let mut out = vec![UNSET; n];
    let mut path = Vec::new();
    for start in 0..n {
        let mut node = start;
        while out[node] == UNSET {
            match forest.parent[node] {
                Some(p) => {
                    path.push(node);
                    node = p;
                }
                None => {
                    out[node] = node;
                }
            }
        }
        let root = out[node];
        for v in path.drain(..) {
            out[v] = root;
        }
    }
    out
}

/// Whether following parent links from `from` reaches `to` (a sample reaches
/// itself). Panics if either index is out of range.
pub fn directed_path_exists(forest: &QuickShiftForest, from: usize, to: usize) -> bool {
    assert!(to < forest.len(), "index {to} out of range");
    let mut node = from;
    loop {
        if node == to {
            return true;
        }
        match forest.parent[node] {
            Some(p) => node = p,
            None => return false,
        }
    }
}

/// `max(c * n^(-1/(4+d)), (ln(n)^2 / n)^(1/d))`, a segmentation radius that
/// shrinks with `n` but never below the level-set linking lower bound.
pub fn tau_schedule(n: usize, dim: usize, scale: f64) -> Result<f64> {
    let decay = crate::kernels::recommended_bandwidth(n, dim, scale)?;
    let ln = (n as f64).ln();
    let floor = (ln * ln / n as f64).powf(1.0 / dim as f64);
    Ok(decay.max(floor))
}
