//! Conditional mode estimation with Quick Shift on a density slice.
//!
//! Data are `(x, y)` pairs stored as rows of a `(d + 1)`-column point set,
//! response last. For a query `x` the joint KDE is evaluated along the slice
//! `{(x, y_i)}`, and a one-dimensional Quick Shift forest over the responses
//! with those slice densities yields the conditional modes as its roots.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{kde_evaluate, DensityModel};
use crate::points::PointSet;
use crate::quickshift::{build_forest, QuickShiftForest};

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalModeResult {
    pub query: Vec<f64>,
    /// Response values of the forest roots, in ascending sample order.
    pub mode_estimates: Vec<f64>,
    pub mode_indices: Vec<usize>,
    /// Forest over the responses, built from the slice densities.
    pub forest: QuickShiftForest,
}

/// Responses `y_i`, the last column of `data`.
pub fn responses(data: &PointSet) -> PointSet {
    let d = data.dim();
    PointSet::from_column(&data.rows().map(|r| r[d - 1]).collect::<Vec<_>>())
}

/// `f_h(x, y_i)` for every sample `i`.
pub fn slice_densities(data: &PointSet, model: &DensityModel, query: &[f64]) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptySamples);
    }
    let d = data.dim();
    if query.len() + 1 != d {
        return Err(Error::DimensionMismatch {
            expected: d - 1,
            found: query.len(),
        });
    }
    let mut coords = Vec::with_capacity(data.len() * d);
    for row in data.rows() {
        coords.extend_from_slice(query);
        coords.push(row[d - 1]);
    }
    kde_evaluate(model, data, &PointSet::new(d, coords)?)
}

pub fn modal_regression(
    data: &PointSet,
    model: &DensityModel,
    tau: f64,
    query: &[f64],
) -> Result<ConditionalModeResult> {
    if !(tau > 0.0) {
        return Err(Error::InvalidTau(tau));
    }
    let slice = slice_densities(data, model, query)?;
    let ys = responses(data);
    let forest = build_forest(&ys, &slice, tau)?;
    let mode_indices = forest.roots();
    let mode_estimates = mode_indices.iter().map(|&i| ys.row(i)[0]).collect();
    Ok(ConditionalModeResult {
        query: query.to_vec(),
        mode_estimates,
        mode_indices,
        forest,
    })
}

/// Runs every query independently over the same data.
pub fn modal_regression_batch(
    data: &PointSet,
    model: &DensityModel,
    tau: f64,
    queries: &[Vec<f64>],
) -> Result<Vec<ConditionalModeResult>> {
    queries
        .par_iter()
        .map(|q| modal_regression(data, model, tau, q))
        .collect()
}
