//! Radial kernels and exact kernel density estimation.
//!
//! Every kernel is a non-increasing profile `k: [0, inf) -> [0, inf)` applied
//! to the Euclidean norm, `K(u) = k(|u|) / c_d`, where `c_d` normalizes the
//! kernel to unit mass in dimension `d`. Normalizers are closed form where one
//! exists and otherwise computed once by Simpson quadrature of the radial
//! integral when the [`Kernel`] is built.
//!
//! Compactly supported profiles include their boundary: `k(1) > 0` is used
//! for `t <= 1`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::points::{squared_distance, PointSet};
use crate::spatial::GridIndex;

/// Silverman's profile changes sign at `t / sqrt(2) = 3 pi / 4`; it is cut
/// to zero there so it stays nonnegative and non-increasing.
const SILVERMAN_SUPPORT: f64 = 3.0 * PI / 4.0 * std::f64::consts::SQRT_2;

const QUADRATURE_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelShape {
    Gaussian,
    Epanechnikov,
    Uniform,
    Triangular,
    Exponential,
    Tricube,
    Cosine,
    Silverman,
}

impl KernelShape {
    pub const ALL: [KernelShape; 8] = [
        KernelShape::Gaussian,
        KernelShape::Epanechnikov,
        KernelShape::Uniform,
        KernelShape::Triangular,
        KernelShape::Exponential,
        KernelShape::Tricube,
        KernelShape::Cosine,
        KernelShape::Silverman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelShape::Gaussian => "gaussian",
            KernelShape::Epanechnikov => "epanechnikov",
            KernelShape::Uniform => "uniform",
            KernelShape::Triangular => "triangular",
            KernelShape::Exponential => "exponential",
            KernelShape::Tricube => "tricube",
            KernelShape::Cosine => "cosine",
            KernelShape::Silverman => "silverman",
        }
    }

    /// Unnormalized radial profile `k(t)`.
    pub fn profile(self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match self {
            KernelShape::Gaussian => (-0.5 * t * t).exp(),
            KernelShape::Exponential => (-t).exp(),
            KernelShape::Silverman => {
                if t <= SILVERMAN_SUPPORT {
                    let s = t * FRAC_1_SQRT_2;
                    ((-s).exp() * (s + FRAC_PI_4).sin()).max(0.0)
                } else {
                    0.0
                }
            }
            _ if t > 1.0 => 0.0,
            KernelShape::Epanechnikov => 1.0 - t * t,
            KernelShape::Uniform => 1.0,
            KernelShape::Triangular => 1.0 - t,
            KernelShape::Tricube => {
                let c = 1.0 - t * t * t;
                c * c * c
            }
            KernelShape::Cosine => (FRAC_PI_2 * t).cos(),
        }
    }

    /// Profile evaluated from a squared radius; avoids the square root where
    /// the profile allows it.
    #[inline]
    fn profile_sq(self, t2: f64) -> f64 {
        match self {
            KernelShape::Gaussian => (-0.5 * t2).exp(),
            KernelShape::Epanechnikov => {
                if t2 <= 1.0 {
                    1.0 - t2
                } else {
                    0.0
                }
            }
            KernelShape::Uniform => {
                if t2 <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.profile(t2.sqrt()),
        }
    }

    /// Radius outside of which the profile vanishes, if any.
    pub fn support_radius(self) -> Option<f64> {
        match self {
            KernelShape::Gaussian | KernelShape::Exponential => None,
            KernelShape::Silverman => Some(SILVERMAN_SUPPORT),
            _ => Some(1.0),
        }
    }

    /// `int_{R^d} k(|u|) du`.
    fn normalizer(self, dim: usize) -> f64 {
        let d = dim as f64;
        let ball = unit_ball_volume(dim);
        let sphere = d * ball;
        match self {
            KernelShape::Gaussian => (2.0 * PI).powf(d / 2.0),
            KernelShape::Uniform => ball,
            KernelShape::Epanechnikov => ball * 2.0 / (d + 2.0),
            KernelShape::Triangular => ball / (d + 1.0),
            KernelShape::Tricube => {
                sphere * (1.0 / d - 3.0 / (d + 3.0) + 3.0 / (d + 6.0) - 1.0 / (d + 9.0))
            }
            KernelShape::Exponential => sphere * gamma_half_integer(2 * dim),
            KernelShape::Cosine | KernelShape::Silverman => {
                let radius = self.support_radius().expect("compact profile");
                sphere * simpson(|r| r.powi(dim as i32 - 1) * self.profile(r), 0.0, radius)
            }
        }
    }
}

impl fmt::Display for KernelShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        KernelShape::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown kernel `{s}`")))
    }
}

/// A kernel shape normalized to unit mass in a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    shape: KernelShape,
    dim: usize,
    normalizer: f64,
}

impl Kernel {
    pub fn new(shape: KernelShape, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "kernel dimension must be at least 1".into(),
            ));
        }
        Ok(Self {
            shape,
            dim,
            normalizer: shape.normalizer(dim),
        })
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// `K(u)` for a vector `u` of length `dim`.
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.evaluate_radius(norm)
    }

    /// `K` at any point of norm `t`.
    pub fn evaluate_radius(&self, t: f64) -> f64 {
        self.shape.profile(t) / self.normalizer
    }
}

/// Kernel plus bandwidth: the estimator `f_h(x) = 1/(n h^d) sum K((x - X_i)/h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityModel {
    kernel: Kernel,
    bandwidth: f64,
}

impl DensityModel {
    pub fn new(shape: KernelShape, bandwidth: f64, dim: usize) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidBandwidth(bandwidth));
        }
        Ok(Self {
            kernel: Kernel::new(shape, dim)?,
            bandwidth,
        })
    }

    pub fn gaussian(bandwidth: f64, dim: usize) -> Result<Self> {
        Self::new(KernelShape::Gaussian, bandwidth, dim)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim
    }

    fn check_inputs(&self, samples: &PointSet, queries: &PointSet) -> Result<()> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        samples.check_dim(self.dim())?;
        queries.check_dim(self.dim())
    }

    /// `1 / (c_d n h^d)`.
    fn scale(&self, n: usize) -> f64 {
        1.0 / (self.kernel.normalizer * n as f64 * self.bandwidth.powi(self.dim() as i32))
    }

    /// Exact estimate at a single point; the sum runs over samples in index order.
    pub fn density_at(&self, samples: &PointSet, point: &[f64]) -> f64 {
        let inv_h2 = 1.0 / (self.bandwidth * self.bandwidth);
        let sum = match self.kernel.shape {
            KernelShape::Gaussian => profile_sum(samples, point, inv_h2, |t2| (-0.5 * t2).exp()),
            KernelShape::Epanechnikov => profile_sum(samples, point, inv_h2, |t2| {
                if t2 <= 1.0 {
                    1.0 - t2
                } else {
                    0.0
                }
            }),
            shape => profile_sum(samples, point, inv_h2, |t2| shape.profile_sq(t2)),
        };
        sum * self.scale(samples.len())
    }
}

/// `sum_i k(|point - x_i|^2 / h^2)` in sample order, with the profile given
/// as a function of the squared scaled radius.
#[inline]
fn profile_sum(
    samples: &PointSet,
    point: &[f64],
    inv_h2: f64,
    profile: impl Fn(f64) -> f64,
) -> f64 {
    let mut acc = 0.0;
    if let [q] = point {
        for &x in samples.as_slice() {
            let diff = q - x;
            acc += profile(diff * diff * inv_h2);
        }
    } else {
        for x in samples.rows() {
            acc += profile(squared_distance(point, x) * inv_h2);
        }
    }
    acc
}

/// Exact KDE at every query. Queries are evaluated in parallel, each with a
/// sequential sum in sample order, so the output does not depend on the
/// thread count.
pub fn kde_evaluate(
    model: &DensityModel,
    samples: &PointSet,
    queries: &PointSet,
) -> Result<Vec<f64>> {
    model.check_inputs(samples, queries)?;
    Ok((0..queries.len())
        .into_par_iter()
        .map(|j| model.density_at(samples, queries.row(j)))
        .collect())
}

/// KDE at the samples themselves. Identical, value for value, to
/// `kde_evaluate(model, samples, samples)`.
pub fn kde_self_evaluate(model: &DensityModel, samples: &PointSet) -> Result<Vec<f64>> {
    kde_evaluate(model, samples, samples)
}

/// KDE that skips samples farther than `radius_factor * h` from the query.
///
/// The result under-estimates the exact value by at most
/// [`truncation_error_bound`]. Not used by any other routine in the crate.
pub fn kde_evaluate_truncated(
    model: &DensityModel,
    samples: &PointSet,
    queries: &PointSet,
    radius_factor: f64,
) -> Result<Vec<f64>> {
    model.check_inputs(samples, queries)?;
    if !(radius_factor > 0.0 && radius_factor.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "truncation radius factor must be positive, got {radius_factor}"
        )));
    }
    let radius = radius_factor * model.bandwidth;
    let index = GridIndex::new(samples, radius);
    let inv_h2 = 1.0 / (model.bandwidth * model.bandwidth);
    let shape = model.kernel.shape;
    let scale = model.scale(samples.len());
    Ok((0..queries.len())
        .into_par_iter()
        .map(|j| {
            let q = queries.row(j);
            let mut near = index.within(q, radius);
            near.sort_unstable();
            near.iter()
                .map(|&i| shape.profile_sq(squared_distance(q, samples.row(i)) * inv_h2))
                .sum::<f64>()
                * scale
        })
        .collect())
}

/// Upper bound on `exact - truncated` for [`kde_evaluate_truncated`]: each
/// omitted sample contributes at most `k(R) / (c_d n h^d)` and at most `n`
/// samples are omitted.
pub fn truncation_error_bound(model: &DensityModel, radius_factor: f64) -> f64 {
    model.kernel.shape.profile(radius_factor) * model.scale(1)
}

/// `c * n^(-1/(4+d))`.
pub fn recommended_bandwidth(n: usize, dim: usize, scale: f64) -> Result<f64> {
    if n == 0 || dim == 0 || !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth schedule needs n >= 1, d >= 1, c > 0 (got n={n}, d={dim}, c={scale})"
        )));
    }
    Ok(scale * (n as f64).powf(-1.0 / (4.0 + dim as f64)))
}

fn unit_ball_volume(dim: usize) -> f64 {
    PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim + 2)
}

/// `Gamma(m / 2)` for a positive integer `m`.
fn gamma_half_integer(m: usize) -> f64 {
    debug_assert!(m > 0);
    let (mut value, mut x) = if m.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let n = QUADRATURE_INTERVALS;
    let step = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + step * i as f64);
    }
    acc * step / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_integers() {
        assert!((gamma_half_integer(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer(2), 1.0);
        assert_eq!(gamma_half_integer(8), 6.0);
        assert!((gamma_half_integer(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_normalizers_match_textbook_constants() {
        let k = |s| Kernel::new(s, 1).unwrap();
        assert!((k(KernelShape::Epanechnikov).evaluate_radius(0.0) - 0.75).abs() < 1e-15);
        assert!((k(KernelShape::Uniform).evaluate_radius(0.3) - 0.5).abs() < 1e-15);
        assert!((k(KernelShape::Triangular).evaluate_radius(0.0) - 1.0).abs() < 1e-15);
        assert!((k(KernelShape::Tricube).evaluate_radius(0.0) - 70.0 / 81.0).abs() < 1e-14);
        assert!((k(KernelShape::Cosine).evaluate_radius(0.0) - PI / 4.0).abs() < 1e-12);
        assert!((k(KernelShape::Exponential).evaluate_radius(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn compact_support_includes_boundary() {
        for shape in [KernelShape::Uniform, KernelShape::Epanechnikov] {
            assert!(shape.profile(1.0) >= 0.0);
            assert_eq!(shape.profile(1.0 + 1e-12), 0.0);
        }
        assert_eq!(KernelShape::Uniform.profile(1.0), 1.0);
        assert_eq!(KernelShape::Uniform.profile_sq(1.0), 1.0);
    }

    #[test]
    fn silverman_is_cut_at_first_zero() {
        assert_eq!(
            KernelShape::Silverman.profile(SILVERMAN_SUPPORT + 1e-9),
            0.0
        );
        assert!(KernelShape::Silverman.profile(SILVERMAN_SUPPORT - 1e-3) >= 0.0);
        assert!(KernelShape::Silverman.profile(5.0) == 0.0);
    }

    #[test]
    fn parses_kernel_names() {
        assert_eq!(
            "Gaussian".parse::<KernelShape>().unwrap(),
            KernelShape::Gaussian
        );
        assert!("boxcar".parse::<KernelShape>().is_err());
    }

    #[test]
    fn truncated_estimate_stays_within_bound() {
        let samples = PointSet::from_column(&[0.0, 0.3, 0.9, 2.5, 4.0, 4.1]);
        let queries = PointSet::from_column(&[-1.0, 0.5, 2.0, 4.05]);
        let model = DensityModel::gaussian(0.5, 1).unwrap();
        let exact = kde_evaluate(&model, &samples, &queries).unwrap();
        let cut = kde_evaluate_truncated(&model, &samples, &queries, 3.0).unwrap();
        let bound = truncation_error_bound(&model, 3.0);
        for (e, c) in exact.iter().zip(&cut) {
            assert!(c <= e && e - c <= bound, "{e} {c} {bound}");
        }
    }

    #[test]
    fn bandwidth_schedule() {
        assert!((recommended_bandwidth(1024, 1, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(recommended_bandwidth(1, 7, 1.0).unwrap(), 1.0);
        assert!((recommended_bandwidth(1_000_000, 2, 2.0).unwrap() - 0.2).abs() < 1e-12);
        assert!(recommended_bandwidth(0, 1, 1.0).is_err());
        assert!(recommended_bandwidth(10, 1, 0.0).is_err());
    }
}
