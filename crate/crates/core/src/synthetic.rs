//! Analytic ground-truth densities for experiments and tests.
//!
//! Mixtures use diagonal Gaussian components. Sampling draws from ChaCha20
//! (`rand_chacha::ChaCha20Rng::seed_from_u64`), picks a component by
//! inverting the cumulative weights with one uniform draw and then fills the
//! coordinates with standard normal draws from `rand_distr::StandardNormal`,
//! so a `(seed, n)` pair always yields the same points.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::analysis::DensityOracle;
use crate::error::{Error, Result};
use crate::points::PointSet;

const MODE_DEDUP_RADIUS: f64 = 1e-4;
const REFINE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Per-axis standard deviations.
    pub sd: Vec<f64>,
}

impl GaussianComponent {
    pub fn new(weight: f64, mean: Vec<f64>, sd: Vec<f64>) -> Self {
        Self { weight, mean, sd }
    }

    pub fn isotropic(weight: f64, mean: Vec<f64>, sd: f64) -> Self {
        let sd = vec![sd; mean.len()];
        Self { weight, mean, sd }
    }

    fn pdf(&self, x: &[f64]) -> f64 {
        let mut exponent = 0.0;
        let mut scale = 1.0;
        for ((xi, m), s) in x.iter().zip(&self.mean).zip(&self.sd) {
            let z = (xi - m) / s;
            exponent += z * z;
            scale *= s * (2.0 * PI).sqrt();
        }
        (-0.5 * exponent).exp() / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDensity {
    dim: usize,
    components: Vec<GaussianComponent>,
}

impl MixtureDensity {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        let dim = components.first().map(|c| c.mean.len()).ok_or_else(|| {
            Error::InvalidParameter("mixture needs at least one component".into())
        })?;
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "mixture dimension must be at least 1".into(),
            ));
        }
        for c in &components {
            if c.mean.len() != dim || c.sd.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.mean.len().max(c.sd.len()),
                });
            }
            if !(c.weight >= 0.0) || c.sd.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                return Err(Error::InvalidParameter(
                    "weights must be nonnegative and standard deviations positive".into(),
                ));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { dim, components })
    }

    /// One-dimensional mixture from `(weight, mean, sd)` triples.
    pub fn univariate(parts: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .map(|&(w, m, s)| GaussianComponent::new(w, vec![m], vec![s]))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn density_at(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.pdf(x))
    }

    pub(crate) fn pdf(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.weight * c.pdf(x)).sum()
    }

    pub fn sample(&self, n: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(n * self.dim);
        for _ in 0..n {
            let c = &self.components[self.pick_component(rng.random::<f64>())];
            for (m, s) in c.mean.iter().zip(&c.sd) {
                let z: f64 = rng.sample(StandardNormal);
                data.push(m + s * z);
            }
        }
        PointSet::new(self.dim, data).expect("dimension is positive")
    }

    fn pick_component(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (k, c) in self.components.iter().enumerate() {
            if c.weight > 0.0 {
                acc += c.weight;
                last = k;
                if u < acc {
                    return k;
                }
            }
        }
        last
    }

    /// Local maxima inside `search_box` (one `(lo, hi)` pair per axis).
    ///
    /// Grid points that dominate all their grid neighbours are refined by
    /// cyclic golden-section searches along each axis, then merged when closer
    /// than `1e-4`. Maxima on the box boundary are ignored.
    pub fn true_modes(&self, search_box: &[(f64, f64)], grid_step: f64) -> Result<PointSet> {
        if search_box.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: search_box.len(),
            });
        }
        if !(grid_step > 0.0) || search_box.iter().any(|(lo, hi)| !(hi > lo)) {
            return Err(Error::InvalidParameter(
                "empty search box or non-positive step".into(),
            ));
        }
        let d = self.dim;
        let counts: Vec<usize> = search_box
            .iter()
            .map(|(lo, hi)| ((hi - lo) / grid_step).floor() as usize + 1)
            .collect();
        let total: usize = counts.iter().product();
        let coord = |flat: usize, out: &mut Vec<f64>| {
            out.clear();
            let mut rem = flat;
            for (k, &c) in counts.iter().enumerate() {
                out.push(search_box[k].0 + grid_step * (rem % c) as f64);
                rem /= c;
            }
        };
        let mut values = Vec::with_capacity(total);
        let mut p = Vec::with_capacity(d);
        for flat in 0..total {
            coord(flat, &mut p);
            values.push(self.pdf(&p));
        }

        let strides: Vec<usize> = counts
            .iter()
            .scan(1usize, |acc, &c| {
                let s = *acc;
                *acc *= c;
                Some(s)
            })
            .collect();
        let offsets = neighbour_offsets(d);
        let mut found: Vec<(Vec<f64>, f64)> = Vec::new();
        'grid: for flat in 0..total {
            let v = values[flat];
            if v <= 0.0 {
                continue;
            }
            let mut rem = flat;
            for &c in &counts {
                let i = rem % c;
                if i == 0 || i + 1 == c {
                    continue 'grid;
                }
                rem /= c;
            }
            let mut strictly_above_one = false;
            for off in &offsets {
                let mut nb = flat as isize;
                for k in 0..d {
                    nb += off[k] * strides[k] as isize;
                }
                let w = values[nb as usize];
                if w > v {
                    continue 'grid;
                }
                strictly_above_one |= w < v;
            }
            if !strictly_above_one {
                continue;
            }
            coord(flat, &mut p);
            let refined = self.refine_max(p.clone(), grid_step);
            let value = self.pdf(&refined);
            found.push((refined, value));
        }

        found.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut kept: Vec<Vec<f64>> = Vec::new();
        for (m, _) in found {
            if kept
                .iter()
                .all(|k| crate::points::distance(k, &m) > MODE_DEDUP_RADIUS)
            {
                kept.push(m);
            }
        }
        kept.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Ok(if kept.is_empty() {
            PointSet::new(d, Vec::new())?
        } else {
            PointSet::from_rows(&kept)?
        })
    }

    fn refine_max(&self, mut x: Vec<f64>, step: f64) -> Vec<f64> {
        for _ in 0..200 {
            let mut moved: f64 = 0.0;
            for k in 0..self.dim {
                let start = x[k];
                let mut probe = x.clone();
                let best = golden_section(
                    |t| {
                        probe[k] = t;
                        -self.pdf(&probe)
                    },
                    start - step,
                    start + step,
                );
                x[k] = best;
                moved = moved.max((best - start).abs());
            }
            if moved < REFINE_TOLERANCE * 1e-2 {
                break;
            }
        }
        x
    }

    /// Location and value of the density minimum on `[a, b]` for a
    /// one-dimensional mixture. Errors if the minimum sits at an endpoint.
    pub fn saddle_1d(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dim,
            });
        }
        if !(b > a) {
            return Err(Error::InvalidParameter(format!(
                "empty interval [{a}, {b}]"
            )));
        }
        const STEPS: usize = 10_000;
        let step = (b - a) / STEPS as f64;
        let (arg, _) = (0..=STEPS)
            .map(|k| (k, self.pdf(&[a + step * k as f64])))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("grid is nonempty");
        if arg == 0 || arg == STEPS {
            return Err(Error::NoInteriorMinimum { a, b });
        }
        let center = a + step * arg as f64;
        let x = golden_section(|t| self.pdf(&[t]), center - step, center + step);
        Ok((x, self.pdf(&[x])))
    }

    /// Minimum density between two modes: the level at which their level-set
    /// components merge.
    pub fn saddle_level_1d(&self, a: f64, b: f64) -> Result<f64> {
        self.saddle_1d(a, b).map(|(_, v)| v)
    }
}

impl DensityOracle for MixtureDensity {
    fn dim(&self) -> usize {
        self.dim
    }

    fn density(&self, x: &[f64]) -> f64 {
        self.pdf(x)
    }

    /// Sum over components of `w sup |grad N|`, where for a diagonal Gaussian
    /// `sup |grad N| <= exp(-1/2) / (sd_min prod(sd) (2 pi)^(d/2))`.
    fn lipschitz_bound(&self) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let sd_min = c.sd.iter().copied().fold(f64::INFINITY, f64::min);
                let norm: f64 = c.sd.iter().map(|s| s * (2.0 * PI).sqrt()).product();
                c.weight * (-0.5f64).exp() / (sd_min * norm)
            })
            .sum()
    }
}

/// Uniform density on `[lo, hi]`, the flat counter-example with no valleys.
/// The Lipschitz bound is the interior one (zero), so certificates are only
/// meaningful for balls inside the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatDensity {
    pub lo: f64,
    pub hi: f64,
}

impl FlatDensity {
    pub fn sample(&self, n: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..n)
            .map(|_| self.lo + (self.hi - self.lo) * rng.random::<f64>())
            .collect();
        PointSet::from_column(&values)
    }
}

impl DensityOracle for FlatDensity {
    fn dim(&self) -> usize {
        1
    }

    fn density(&self, x: &[f64]) -> f64 {
        if x[0] >= self.lo && x[0] <= self.hi {
            1.0 / (self.hi - self.lo)
        } else {
            0.0
        }
    }

    fn lipschitz_bound(&self) -> f64 {
        0.0
    }
}

/// Joint law with `x ~ Uniform[0, 1]^d` and `y | x` a one-dimensional
/// Gaussian mixture that does not depend on `x`. Rows are `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMixture {
    pub x_dim: usize,
    pub response: MixtureDensity,
}

impl ConditionalMixture {
    pub fn new(x_dim: usize, response: MixtureDensity) -> Result<Self> {
        if response.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: response.dim(),
            });
        }
        Ok(Self { x_dim, response })
    }

    pub fn sample(&self, n: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(n * (self.x_dim + 1));
        for _ in 0..n {
            for _ in 0..self.x_dim {
                data.push(rng.random::<f64>());
            }
            let c = &self.response.components[self.response.pick_component(rng.random::<f64>())];
            let z: f64 = rng.sample(StandardNormal);
            data.push(c.mean[0] + c.sd[0] * z);
        }
        PointSet::new(self.x_dim + 1, data).expect("dimension is positive")
    }

    /// Modes of `f(y | x)`; identical for every `x` in the unit cube.
    pub fn conditional_modes(&self) -> Result<Vec<f64>> {
        let lo = self
            .response
            .components
            .iter()
            .map(|c| c.mean[0] - 6.0 * c.sd[0])
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .response
            .components
            .iter()
            .map(|c| c.mean[0] + 6.0 * c.sd[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let modes = self.response.true_modes(&[(lo, hi)], 1e-3)?;
        Ok(modes.as_slice().to_vec())
    }
}

/// A named ground-truth distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogDensity {
    Mixture(MixtureDensity),
    Conditional(ConditionalMixture),
    Flat(FlatDensity),
}

impl CatalogDensity {
    pub fn dim(&self) -> usize {
        match self {
            CatalogDensity::Mixture(m) => m.dim(),
            CatalogDensity::Conditional(c) => c.x_dim + 1,
            CatalogDensity::Flat(_) => 1,
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> PointSet {
        match self {
            CatalogDensity::Mixture(m) => m.sample(n, seed),
            CatalogDensity::Conditional(c) => c.sample(n, seed),
            CatalogDensity::Flat(f) => f.sample(n, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Which of the regularity conditions (Holder continuity, continuous level
    /// sets, point modes with negative-definite Hessian, level-set regularity)
    /// the density satisfies, and how that was established.
    pub assumptions: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "standard-normal",
        description: "N(0, 1) in one dimension",
        assumptions: "smooth, strictly log-concave: single point mode with negative curvature, \
                      no flat regions; support is unbounded but mass beyond 8 sd is below 1e-15",
    },
    CatalogEntry {
        name: "two-gaussian-10sep",
        description: "0.5 N(0, 0.5^2) + 0.5 N(10, 0.5^2)",
        assumptions: "two point modes at 0 and 10 (cross-terms below 1e-40), each locally \
                      log-concave; deep valley at 5 separates them",
    },
    CatalogEntry {
        name: "dominant-with-bump",
        description: "0.9 N(0, 0.3^2) + 0.1 N(1.5, 0.3^2)",
        assumptions: "two point modes (about 0 and 1.5) with a dip near 0.91; the minor mode is \
                      the maximum of its 0.5-ball but not of its 2.0-ball",
    },
    CatalogEntry {
        name: "trimodal",
        description: "equal-weight N(0, 1.7^2), N(5, 1.7^2), N(10, 1.7^2)",
        assumptions: "three point modes (about 0.074, 5, 9.926) with saddles near 2.499 and 7.501 \
                      at density 0.0531; smooth everywhere; verified numerically by the \
                      grid-and-refine oracles",
    },
    CatalogEntry {
        name: "far-pair",
        description: "0.5 N(-10, 1) + 0.5 N(10, 1)",
        assumptions: "two point modes at -10 and 10 to within 1e-6",
    },
    CatalogEntry {
        name: "planar-pair",
        description: "0.5 N((0, 0), 0.5^2 I) + 0.5 N((4, 0), 0.5^2 I) in two dimensions",
        assumptions: "two point modes with negative-definite Hessians, separated by a deep valley",
    },
    CatalogEntry {
        name: "flat-uniform",
        description: "Uniform[-5, 5]; flat counter-example",
        assumptions: "violates continuity of level sets: the density is constant on its support",
    },
    CatalogEntry {
        name: "normal-conditional",
        description: "x ~ U[0, 1], y | x ~ N(0, 1)",
        assumptions: "conditional density is standard normal for every x; single mode at 0",
    },
    CatalogEntry {
        name: "bimodal-conditional",
        description: "x ~ U[0, 1], y | x ~ 0.5 N(-2, 0.25^2) + 0.5 N(2, 0.25^2)",
        assumptions: "conditional modes at -2 and 2 for every x",
    },
];

pub fn catalog_density(name: &str) -> Option<CatalogDensity> {
    let uni =
        |parts: &[(f64, f64, f64)]| MixtureDensity::univariate(parts).expect("valid catalog entry");
    Some(match name {
        "standard-normal" => CatalogDensity::Mixture(uni(&[(1.0, 0.0, 1.0)])),
        "two-gaussian-10sep" => CatalogDensity::Mixture(uni(&[(0.5, 0.0, 0.5), (0.5, 10.0, 0.5)])),
        "dominant-with-bump" => CatalogDensity::Mixture(uni(&[(0.9, 0.0, 0.3), (0.1, 1.5, 0.3)])),
        "trimodal" => {
            let w = 1.0 / 3.0;
            let parts = [(w, 0.0, 1.7), (w, 5.0, 1.7), (1.0 - 2.0 * w, 10.0, 1.7)];
            CatalogDensity::Mixture(uni(&parts))
        }
        "far-pair" => CatalogDensity::Mixture(uni(&[(0.5, -10.0, 1.0), (0.5, 10.0, 1.0)])),
        "planar-pair" => CatalogDensity::Mixture(
            MixtureDensity::new(vec![
                GaussianComponent::isotropic(0.5, vec![0.0, 0.0], 0.5),
                GaussianComponent::isotropic(0.5, vec![4.0, 0.0], 0.5),
            ])
            .expect("valid catalog entry"),
        ),
        "flat-uniform" => CatalogDensity::Flat(FlatDensity { lo: -5.0, hi: 5.0 }),
        "normal-conditional" => CatalogDensity::Conditional(
            ConditionalMixture::new(1, uni(&[(1.0, 0.0, 1.0)])).expect("valid catalog entry"),
        ),
        "bimodal-conditional" => CatalogDensity::Conditional(
            ConditionalMixture::new(1, uni(&[(0.5, -2.0, 0.25), (0.5, 2.0, 0.25)]))
                .expect("valid catalog entry"),
        ),
        _ => return None,
    })
}

/// Catalog mixture by name, `None` for unknown names and non-mixture entries.
pub fn catalog_mixture(name: &str) -> Option<MixtureDensity> {
    match catalog_density(name)? {
        CatalogDensity::Mixture(m) => Some(m),
        _ => None,
    }
}

pub fn catalog_conditional(name: &str) -> Option<ConditionalMixture> {
    match catalog_density(name)? {
        CatalogDensity::Conditional(c) => Some(c),
        _ => None,
    }
}

/// All `3^d - 1` nonzero offsets in `{-1, 0, 1}^d`.
fn neighbour_offsets(d: usize) -> Vec<Vec<isize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-1..=1).map(move |o| {
                    let mut w = v.clone();
                    w.push(o);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&o| o != 0));
    out
}

/// Minimizer of a unimodal `f` on `[a, b]`.
fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > REFINE_TOLERANCE * 1e-2 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_normal_density() {
        let m = catalog_mixture("standard-normal").unwrap();
        assert!((m.density_at(&[0.0]).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!(m.density_at(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn far_pair_density_at_origin() {
        let m = catalog_mixture("far-pair").unwrap();
        let phi10 = (-50f64).exp() / (2.0 * PI).sqrt();
        let got = m.density_at(&[0.0]).unwrap();
        assert!((got - phi10).abs() < 1e-12 * phi10);
        assert!((got - 7.69e-23).abs() < 0.01e-23);
    }

    #[test]
    fn weights_must_sum_to_one() {
        assert!(MixtureDensity::univariate(&[(0.5, 0.0, 1.0)]).is_err());
        assert!(MixtureDensity::univariate(&[(1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let m = catalog_mixture("two-gaussian-10sep").unwrap();
        assert_eq!(m.sample(50, 3), m.sample(50, 3));
        assert_ne!(m.sample(50, 3), m.sample(50, 4));
    }

    #[test]
    fn zero_weight_component_is_never_drawn() {
        let m = MixtureDensity::univariate(&[(1.0, 0.0, 1.0), (0.0, 100.0, 1.0)]).unwrap();
        assert!(m.sample(2000, 1).as_slice().iter().all(|v| v.abs() < 10.0));
    }

    #[test]
    fn saddle_of_symmetric_pair_is_midpoint() {
        let m = catalog_mixture("two-gaussian-10sep").unwrap();
        let (x, v) = m.saddle_1d(2.0, 8.0).unwrap();
        assert!((x - 5.0).abs() < 1e-6);
        assert!((v - m.density_at(&[5.0]).unwrap()).abs() <= 1e-12 * v);
    }

    #[test]
    fn monotone_segment_has_no_saddle() {
        let m = catalog_mixture("standard-normal").unwrap();
        assert_eq!(
            m.saddle_level_1d(0.5, 3.0).unwrap_err(),
            Error::NoInteriorMinimum { a: 0.5, b: 3.0 }
        );
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section(|t| (t - 0.3) * (t - 0.3), -1.0, 2.0);
        assert!((x - 0.3).abs() < 1e-8);
    }
}
