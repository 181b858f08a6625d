//! Error metrics and separation certificates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::points::{distance, PointSet};

/// Ground-truth density with a global Lipschitz bound, used to certify
/// density inequalities from grid evaluations.
pub trait DensityOracle {
    fn dim(&self) -> usize;
    fn density(&self, x: &[f64]) -> f64;
    /// `L` with `|f(x) - f(y)| <= L |x - y|` on the region being certified.
    fn lipschitz_bound(&self) -> f64;
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySamples);
    }
    b.check_dim(a.dim())?;
    Ok(directed(a, b).max(directed(b, a)))
}

fn directed(from: &PointSet, to: &PointSet) -> f64 {
    from.rows()
        .map(|p| {
            to.rows()
                .map(|q| distance(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeMatch {
    pub estimated: usize,
    pub truth: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MatchReport {
    pub pairs: Vec<ModeMatch>,
    pub unmatched_estimated: Vec<usize>,
    pub unmatched_truth: Vec<usize>,
}

/// One-to-one greedy matching: candidate pairs within `radius` are taken in
/// ascending distance order (ties by estimated, then true index) as long as
/// neither side is already used.
pub fn match_modes(estimated: &PointSet, truth: &PointSet, radius: f64) -> Result<MatchReport> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "match radius must be positive, got {radius}"
        )));
    }
    if !estimated.is_empty() && !truth.is_empty() {
        truth.check_dim(estimated.dim())?;
    }
    let mut candidates = Vec::new();
    for (e, p) in estimated.rows().enumerate() {
        for (t, q) in truth.rows().enumerate() {
            let d = distance(p, q);
            if d <= radius {
                candidates.push(ModeMatch {
                    estimated: e,
                    truth: t,
                    distance: d,
                });
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.estimated.cmp(&b.estimated))
            .then(a.truth.cmp(&b.truth))
    });
    let mut used_e = vec![false; estimated.len()];
    let mut used_t = vec![false; truth.len()];
    let mut report = MatchReport::default();
    for c in candidates {
        if !used_e[c.estimated] && !used_t[c.truth] {
            used_e[c.estimated] = true;
            used_t[c.truth] = true;
            report.pairs.push(c);
        }
    }
    report.unmatched_estimated = (0..estimated.len()).filter(|&i| !used_e[i]).collect();
    report.unmatched_truth = (0..truth.len()).filter(|&i| !used_t[i]).collect();
    Ok(report)
}

/// Whether "every path between the two points crosses the separator" was
/// checked or taken on trust.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathPremise {
    Verified,
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub separator: Vec<Vec<f64>>,
    pub r_s: f64,
    pub delta: f64,
    /// Grid maximum of the density over the thickened separator.
    pub sup_separator: f64,
    /// Grid minimum of the density over the balls around the two points.
    pub inf_endpoints: f64,
    /// `inf - sup - delta - 2 L step`; positive iff the certificate holds.
    pub slack: f64,
    pub path_premise: PathPremise,
    pub valid: bool,
    pub reason: Option<String>,
}

/// Certifies on a grid that `sup_{S + B(0, r_s)} f < inf_{B(x1, r_s) u B(x2, r_s)} f - delta`.
///
/// In one dimension the only path between `x1` and `x2` is the segment, so
/// the separator blocks every path iff it has a point strictly between them;
/// otherwise the certificate comes back invalid. Grid extrema are widened by
/// `L * grid_step` on each side, with `L` the oracle's Lipschitz bound.
pub fn certify_separation_1d(
    oracle: &impl DensityOracle,
    x1: f64,
    x2: f64,
    separator: &[f64],
    r_s: f64,
    delta: f64,
    grid_step: f64,
) -> Result<SeparationCertificate> {
    if oracle.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: oracle.dim(),
        });
    }
    check_certificate_params(r_s, delta, grid_step)?;
    if separator.is_empty() {
        return Err(Error::InvalidParameter("separator set is empty".into()));
    }
    let (lo, hi) = (x1.min(x2), x1.max(x2));
    let blocks = separator.iter().any(|&s| s > lo && s < hi);

    let sup = separator
        .iter()
        .flat_map(|&s| interval_grid(s, r_s, grid_step))
        .map(|x| oracle.density(&[x]))
        .fold(f64::NEG_INFINITY, f64::max);
    let inf = [x1, x2]
        .into_iter()
        .flat_map(|c| interval_grid(c, r_s, grid_step))
        .map(|x| oracle.density(&[x]))
        .fold(f64::INFINITY, f64::min);

    let mut cert = finish(
        vec![x1],
        vec![x2],
        separator.iter().map(|&s| vec![s]).collect(),
        r_s,
        delta,
        sup,
        inf,
        oracle.lipschitz_bound() * grid_step,
        PathPremise::Verified,
    );
    if !blocks {
        cert.valid = false;
        cert.reason = Some("separator does not meet the open segment between the points".into());
    }
    Ok(cert)
}

/// Density half of the certificate in any dimension. Grids are axis-aligned
/// with spacing `grid_step` clipped to each ball, so the discretization
/// allowance is `L * grid_step * sqrt(d)`. That every path crosses the
/// separator is not checked and is reported as [`PathPremise::Assumed`].
pub fn certify_separation(
    oracle: &impl DensityOracle,
    x1: &[f64],
    x2: &[f64],
    separator: &PointSet,
    r_s: f64,
    delta: f64,
    grid_step: f64,
) -> Result<SeparationCertificate> {
    let d = oracle.dim();
    for len in [x1.len(), x2.len(), separator.dim()] {
        if len != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: len,
            });
        }
    }
    check_certificate_params(r_s, delta, grid_step)?;
    if separator.is_empty() {
        return Err(Error::InvalidParameter("separator set is empty".into()));
    }
    let mut sup = f64::NEG_INFINITY;
    for s in separator.rows() {
        ball_grid(s, r_s, grid_step, |p| sup = sup.max(oracle.density(p)));
    }
    let mut inf = f64::INFINITY;
    for c in [x1, x2] {
        ball_grid(c, r_s, grid_step, |p| inf = inf.min(oracle.density(p)));
    }
    Ok(finish(
        x1.to_vec(),
        x2.to_vec(),
        separator.rows().map(<[f64]>::to_vec).collect(),
        r_s,
        delta,
        sup,
        inf,
        oracle.lipschitz_bound() * grid_step * (d as f64).sqrt(),
        PathPremise::Assumed,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    x1: Vec<f64>,
    x2: Vec<f64>,
    separator: Vec<Vec<f64>>,
    r_s: f64,
    delta: f64,
    sup: f64,
    inf: f64,
    allowance: f64,
    path_premise: PathPremise,
) -> SeparationCertificate {
    let slack = (inf - allowance) - (sup + allowance) - delta;
    let valid = slack > 0.0;
    SeparationCertificate {
        x1,
        x2,
        separator,
        r_s,
        delta,
        sup_separator: sup,
        inf_endpoints: inf,
        slack,
        path_premise,
        valid,
        reason: (!valid).then(|| "density gap does not exceed delta plus grid allowance".into()),
    }
}

fn check_certificate_params(r_s: f64, delta: f64, grid_step: f64) -> Result<()> {
    for (name, v) in [("r_s", r_s), ("delta", delta), ("grid step", grid_step)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

/// Points `c - r + k (2r / m)`, `k = 0..=m`, with spacing at most `step`.
fn interval_grid(c: f64, r: f64, step: f64) -> impl Iterator<Item = f64> {
    let m = ((2.0 * r / step).ceil() as usize).max(1);
    let spacing = 2.0 * r / m as f64;
    (0..=m).map(move |k| c - r + spacing * k as f64)
}

fn ball_grid(center: &[f64], r: f64, step: f64, mut visit: impl FnMut(&[f64])) {
    let axis: Vec<f64> = interval_grid(0.0, r, step).collect();
    let d = center.len();
    let mut idx = vec![0usize; d];
    let mut point = vec![0.0; d];
    loop {
        let mut norm2 = 0.0;
        for k in 0..d {
            point[k] = center[k] + axis[idx[k]];
            norm2 += axis[idx[k]] * axis[idx[k]];
        }
        if norm2 <= r * r * (1.0 + 1e-12) {
            visit(&point);
        }
        let mut k = 0;
        loop {
            if k == d {
                return;
            }
            idx[k] += 1;
            if idx[k] < axis.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> PointSet {
        PointSet::from_column(v)
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff(&col(&[0.0]), &col(&[3.0])).unwrap(), 3.0);
        assert_eq!(
            hausdorff(&col(&[0.0, 1.0]), &col(&[0.0, 1.0])).unwrap(),
            0.0
        );
        assert_eq!(
            hausdorff(&col(&[0.0, 1.0]), &col(&[0.0, 4.0])).unwrap(),
            3.0
        );
        assert_eq!(
            hausdorff(&col(&[]), &col(&[1.0])).unwrap_err(),
            Error::EmptySamples
        );
    }

    #[test]
    fn match_examples() {
        let truth = col(&[0.0, 10.0]);
        let r = match_modes(&col(&[0.05, 9.9]), &truth, 0.5).unwrap();
        assert_eq!(r.pairs.len(), 2);
        assert!(r.unmatched_estimated.is_empty() && r.unmatched_truth.is_empty());

        let r = match_modes(&col(&[0.05]), &truth, 0.5).unwrap();
        assert_eq!((r.pairs.len(), r.unmatched_truth.clone()), (1, vec![1]));

        let r = match_modes(&col(&[0.2, 0.3]), &col(&[0.0]), 0.5).unwrap();
        assert_eq!(r.pairs[0].estimated, 0);
        assert_eq!(r.unmatched_estimated, vec![1]);
    }

    #[test]
    fn interval_grid_covers_endpoints() {
        let g: Vec<f64> = interval_grid(1.0, 0.5, 0.3).collect();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.5);
        assert!((g[4] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn ball_grid_stays_in_ball() {
        let mut count = 0;
        ball_grid(&[1.0, -1.0], 1.0, 0.1, |p| {
            count += 1;
            assert!(distance(p, &[1.0, -1.0]) <= 1.0 + 1e-9);
        });
        // roughly pi / 0.01 grid cells
        assert!((300..330).contains(&count), "{count}");
    }
}
