//! Pre-registered statistical experiments.
//!
//! Each experiment samples from a catalog density, runs the estimators and
//! compares against analytic ground truth with fixed tolerances. Seeds are
//! `base_seed, base_seed + 1, ...`; pass thresholds scale with the seed count
//! (for example "at least 90% of seeds").

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{certify_separation_1d, hausdorff};
use crate::cluster_tree::{level_subgraph, link, ClusterTree, MergeHeight};
use crate::error::{Error, Result};
use crate::kernels::{
    kde_evaluate, kde_self_evaluate, recommended_bandwidth, DensityModel, KernelShape,
};
use crate::modal_regression::modal_regression;
use crate::points::PointSet;
use crate::quickshift::{
    build_forest_with, directed_path_exists, quickshift, tau_schedule, NeighborSearch,
};
use crate::synthetic::{catalog_conditional, catalog_mixture, MixtureDensity};
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seeds: usize,
    pub base_seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seeds: 20,
            base_seed: 1,
        }
    }
}

impl SuiteConfig {
    fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|k| self.base_seed + k).collect()
    }

    /// Seeds for the rate-trend comparisons, capped at ten.
    fn trend_seeds(&self) -> Vec<u64> {
        self.seed_list().into_iter().take(10).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub metrics: Value,
    pub elapsed_seconds: f64,
}

pub struct Experiment {
    pub id: u32,
    pub name: &'static str,
    run: fn(&SuiteConfig) -> Result<(bool, String, Value)>,
}

impl Experiment {
    pub fn run(&self, config: &SuiteConfig) -> Result<CriterionReport> {
        if config.seeds == 0 {
            return Err(Error::InvalidParameter(
                "at least one seed is required".into(),
            ));
        }
        let start = Instant::now();
        let (passed, summary, metrics) = (self.run)(config)?;
        Ok(CriterionReport {
            id: self.id,
            name: self.name,
            passed,
            summary,
            metrics,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        })
    }
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        id: 1,
        name: "oracle-equivalence",
        run: oracle_equivalence,
    },
    Experiment {
        id: 2,
        name: "forest-invariants",
        run: forest_invariants,
    },
    Experiment {
        id: 3,
        name: "mode-recovery",
        run: mode_recovery,
    },
    Experiment {
        id: 4,
        name: "segmentation",
        run: segmentation,
    },
    Experiment {
        id: 5,
        name: "separation",
        run: separation,
    },
    Experiment {
        id: 6,
        name: "cluster-tree",
        run: cluster_tree_levels,
    },
    Experiment {
        id: 7,
        name: "modal-regression",
        run: modal_regression_consistency,
    },
    Experiment {
        id: 8,
        name: "kde-rate",
        run: kde_rate,
    },
];

pub fn experiment(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// Number of random instances in the differential checks.
pub const DIFFERENTIAL_INSTANCES: usize = 200;

/// Bandwidth multiplier for the cluster-tree experiment.
pub const TREE_BANDWIDTH_SCALE: f64 = 3.5;
/// Linking-radius multiplier for the cluster-tree experiment.
pub const TREE_TAU_SCALE: f64 = 1.0;

fn enough(count: usize, total: usize, fraction: f64) -> bool {
    count as f64 >= (fraction * total as f64 - 1e-9).ceil()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn mixture(name: &str) -> MixtureDensity {
    catalog_mixture(name).expect("catalog entry exists")
}

fn rate_bandwidth(n: usize, dim: usize) -> f64 {
    recommended_bandwidth(n, dim, 1.0).expect("n and dim are positive")
}

/// One random differential-test instance.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub samples: PointSet,
    pub model: DensityModel,
    pub tau: f64,
    /// Densities fed to the forest; KDE values, rounded on some instances so
    /// that ties occur.
    pub density: Vec<f64>,
    pub level: f64,
}

/// Instance `seed`: 1 to 300 points in 1 to 3 dimensions, with repeated
/// points, coordinate snapping, random kernels, bandwidths and radii.
pub fn random_instance(seed: u64) -> RandomInstance {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=300usize);
    let dim = rng.random_range(1..=3usize);
    let extent: f64 = rng.random_range(1.0..6.0);
    let snap = rng.random_bool(0.3);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        if !rows.is_empty() && rng.random_bool(0.1) {
            let k = rng.random_range(0..rows.len());
            rows.push(rows[k].clone());
            continue;
        }
        let row = (0..dim)
            .map(|_| {
                let v: f64 = rng.random_range(0.0..extent);
                if snap {
                    (v * 4.0).round() / 4.0
                } else {
                    v
                }
            })
            .collect();
        rows.push(row);
    }
    let samples = PointSet::from_rows(&rows).expect("rows share a dimension");
    let shape = KernelShape::ALL[rng.random_range(0..KernelShape::ALL.len())];
    let h = rng.random_range(0.3..1.0);
    let model = DensityModel::new(shape, h, dim).expect("valid model");
    let tau = if rng.random_bool(0.15) {
        f64::INFINITY
    } else {
        rng.random_range(0.1..2.0)
    };
    let mut density = kde_self_evaluate(&model, &samples).expect("nonempty samples");
    if rng.random_bool(0.4) {
        let max = density
            .iter()
            .copied()
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for v in &mut density {
            *v = (*v / max * 8.0).round();
        }
    }
    let level = density[rng.random_range(0..n)] * rng.random_range(0.5..1.0);
    RandomInstance {
        seed,
        samples,
        model,
        tau,
        density,
        level,
    }
}

fn instance_seeds(config: &SuiteConfig) -> impl Iterator<Item = u64> {
    let base = config.base_seed.wrapping_mul(1_000_003);
    (0..DIFFERENTIAL_INSTANCES as u64).map(move |k| base.wrapping_add(k))
}

fn oracle_equivalence(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let mut kde_worst: f64 = 0.0;
    let mut forest_mismatch = Vec::new();
    let mut link_mismatch = Vec::new();
    let mut tree_mismatch = Vec::new();
    let mut sizes = (usize::MAX, 0usize);
    let mut dims = [0usize; 3];
    for seed in instance_seeds(config) {
        let inst = random_instance(seed);
        let x = &inst.samples;
        sizes = (sizes.0.min(x.len()), sizes.1.max(x.len()));
        dims[x.dim() - 1] += 1;

        let fast = kde_evaluate(&inst.model, x, x)?;
        let slow = verify::naive_kde(&inst.model, x, x)?;
        for (a, b) in fast.iter().zip(&slow) {
            kde_worst = kde_worst.max((a - b).abs());
        }

        let expected = verify::naive_parents(x, &inst.density, inst.tau);
        for search in [
            NeighborSearch::Auto,
            NeighborSearch::Grid,
            NeighborSearch::BruteForce,
        ] {
            let forest = build_forest_with(x, &inst.density, inst.tau, search)?;
            if forest.parents() != expected.as_slice() {
                forest_mismatch.push(seed);
            }
        }

        let forest = build_forest_with(x, &inst.density, inst.tau, NeighborSearch::Auto)?;
        let pieces = level_subgraph(&forest, inst.level).components;
        let naive_pieces = verify::naive_level_components(&expected, &inst.density, inst.level);
        let linked = link(&pieces, x, inst.tau)?;
        if pieces != naive_pieces || linked != verify::naive_components(&naive_pieces, x, inst.tau)?
        {
            link_mismatch.push(seed);
        }
        let tree = ClusterTree::from_forest(&forest, x)?;
        if tree.partition_at(inst.level).components != linked {
            tree_mismatch.push(seed);
        }
    }
    let passed = kde_worst <= 1e-12
        && forest_mismatch.is_empty()
        && link_mismatch.is_empty()
        && tree_mismatch.is_empty();
    let summary = format!(
        "{DIFFERENTIAL_INSTANCES} instances: max KDE gap {kde_worst:.2e}, forest mismatches {}, \
         link mismatches {}, tree mismatches {}",
        forest_mismatch.len(),
        link_mismatch.len(),
        tree_mismatch.len()
    );
    let metrics = json!({
        "instances": DIFFERENTIAL_INSTANCES,
        "first_seed": instance_seeds(config).next(),
        "n_range": [sizes.0, sizes.1],
        "instances_per_dim": dims,
        "max_kde_abs_diff": kde_worst,
        "forest_mismatch_seeds": forest_mismatch,
        "link_mismatch_seeds": link_mismatch,
        "tree_mismatch_seeds": tree_mismatch,
    });
    Ok((passed, summary, metrics))
}

fn forest_invariants(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let mut violations = Vec::new();
    for seed in instance_seeds(config) {
        let inst = random_instance(seed);
        let forest =
            build_forest_with(&inst.samples, &inst.density, inst.tau, NeighborSearch::Auto)?;
        for problem in verify::check_forest(&forest, &inst.samples) {
            violations.push(json!({ "seed": seed, "problem": problem }));
        }
    }
    let summary = format!(
        "{DIFFERENTIAL_INSTANCES} instances: {} invariant violations",
        violations.len()
    );
    Ok((
        violations.is_empty(),
        summary,
        json!({ "instances": DIFFERENTIAL_INSTANCES, "violations": violations }),
    ))
}

fn mode_error(
    m: &MixtureDensity,
    truth: &PointSet,
    n: usize,
    seed: u64,
    tau: f64,
) -> Result<(usize, f64)> {
    let x = m.sample(n, seed);
    let model = DensityModel::gaussian(rate_bandwidth(n, 1), 1)?;
    let forest = quickshift(&x, &model, tau)?;
    let found = crate::quickshift::modes(&forest, &x);
    Ok((found.len(), hausdorff(&found.coordinates, truth)?))
}

fn mode_recovery(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let m = mixture("two-gaussian-10sep");
    let truth = m.true_modes(&[(-3.0, 13.0)], 0.01)?;
    let seeds = config.seed_list();
    let mut hits = 0;
    let mut errors = Vec::new();
    let mut counts = Vec::new();
    for &seed in &seeds {
        let (count, err) = mode_error(&m, &truth, 4000, seed, 1.0)?;
        hits += usize::from(count == 2 && err < 0.25);
        counts.push(count);
        errors.push(err);
    }
    let trend = config.trend_seeds();
    let small: Vec<f64> = trend
        .iter()
        .map(|&s| mode_error(&m, &truth, 1000, s, 1.0).map(|r| r.1))
        .collect::<Result<_>>()?;
    let large: Vec<f64> = trend
        .iter()
        .map(|&s| mode_error(&m, &truth, 16000, s, 1.0).map(|r| r.1))
        .collect::<Result<_>>()?;
    let (med_small, med_large) = (median(&small), median(&large));
    let rate_ok = med_large < 0.7 * med_small;
    let passed = enough(hits, seeds.len(), 0.9) && rate_ok;
    let summary = format!(
        "n=4000: {hits}/{} seeds with 2 modes and Hausdorff < 0.25; median error {med_small:.4} \
         (n=1000) -> {med_large:.4} (n=16000), ratio {:.3}",
        seeds.len(),
        med_large / med_small
    );
    let metrics = json!({
        "true_modes": truth.as_slice(),
        "seeds": seeds,
        "mode_counts": counts,
        "hausdorff_n4000": errors,
        "hits": hits,
        "trend_seeds": trend,
        "hausdorff_n1000": small,
        "hausdorff_n16000": large,
        "median_ratio": med_large / med_small,
    });
    Ok((passed, summary, metrics))
}

fn segmentation(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let m = mixture("dominant-with-bump");
    let seeds = config.seed_list();
    let n = 4000;
    let model = DensityModel::gaussian(rate_bandwidth(n, 1), 1)?;
    let (mut small_hits, mut large_hits) = (0, 0);
    let mut roots = Vec::new();
    for &seed in &seeds {
        let x = m.sample(n, seed);
        let density = kde_self_evaluate(&model, &x)?;
        let at_small = build_forest_with(&x, &density, 0.5, NeighborSearch::Auto)?
            .roots()
            .len();
        let at_large = build_forest_with(&x, &density, 2.5, NeighborSearch::Auto)?
            .roots()
            .len();
        small_hits += usize::from(at_small == 2);
        large_hits += usize::from(at_large == 1);
        roots.push([at_small, at_large]);
    }
    let passed = enough(small_hits, seeds.len(), 0.8) && enough(large_hits, seeds.len(), 0.8);
    let summary = format!(
        "tau=0.5: {small_hits}/{0} seeds with 2 roots; tau=2.5: {large_hits}/{0} seeds with 1 root",
        seeds.len()
    );
    Ok((
        passed,
        summary,
        json!({ "seeds": seeds, "roots_tau_0_5_and_2_5": roots }),
    ))
}

fn separation(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let m = mixture("two-gaussian-10sep");
    let (r_s, tau, step) = (1.0, 0.45, 1e-3);
    let probe = certify_separation_1d(&m, 0.0, 10.0, &[5.0], r_s, f64::MIN_POSITIVE, step)?;
    let delta = 0.5 * (probe.inf_endpoints - probe.sup_separator);
    let cert = certify_separation_1d(&m, 0.0, 10.0, &[5.0], r_s, delta, step)?;
    let n = 400;
    let model = DensityModel::gaussian(0.5, 1)?;
    let seeds = config.seed_list();
    let mut violations = Vec::new();
    let mut pairs_checked = 0usize;
    for &seed in &seeds {
        let x = m.sample(n, seed);
        let forest = quickshift(&x, &model, tau)?;
        let left: Vec<usize> = (0..n).filter(|&i| x.row(i)[0] < 5.0).collect();
        let right: Vec<usize> = (0..n).filter(|&i| x.row(i)[0] > 5.0).collect();
        let mut bad = 0usize;
        for &a in &left {
            for &b in &right {
                bad += usize::from(directed_path_exists(&forest, a, b));
                bad += usize::from(directed_path_exists(&forest, b, a));
            }
        }
        pairs_checked += left.len() * right.len();
        violations.push(bad);
    }
    let clean = violations.iter().filter(|&&v| v == 0).count();
    let passed = cert.valid && tau < r_s / 2.0 && clean == seeds.len();
    let summary = format!(
        "certificate valid: {} (slack {:.3e}); {clean}/{} seeds without cross-valley paths",
        cert.valid,
        cert.slack,
        seeds.len()
    );
    let metrics = json!({
        "certificate": cert,
        "tau": tau,
        "seeds": seeds,
        "cross_pairs_checked": pairs_checked,
        "violating_paths_per_seed": violations,
    });
    Ok((passed, summary, metrics))
}

/// Intervals `[lo, hi]` of grid points on which `f >= level`.
fn superlevel_intervals(
    m: &MixtureDensity,
    level: f64,
    range: (f64, f64),
    step: f64,
) -> Vec<(f64, f64)> {
    let count = ((range.1 - range.0) / step).ceil() as usize;
    let mut out = Vec::new();
    let mut open: Option<f64> = None;
    for k in 0..=count {
        let x = range.0 + step * k as f64;
        let inside = m.pdf(&[x]) >= level;
        match (inside, open) {
            (true, None) => open = Some(x),
            (false, Some(lo)) => {
                out.push((lo, x - step));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = open {
        out.push((lo, range.1));
    }
    out
}

/// Samples in each true component of `{f >= level}`.
fn true_components(m: &MixtureDensity, x: &PointSet, level: f64) -> Vec<Vec<usize>> {
    const STEP: f64 = 1e-3;
    let intervals = superlevel_intervals(m, level, (-15.0, 25.0), STEP);
    let mut out = vec![Vec::new(); intervals.len()];
    for i in 0..x.len() {
        let v = x.row(i)[0];
        if m.pdf(&[v]) < level {
            continue;
        }
        if let Some(c) = intervals
            .iter()
            .position(|&(lo, hi)| v >= lo - STEP && v <= hi + STEP)
        {
            out[c].push(i);
        }
    }
    out
}

fn nearest_sample(x: &PointSet, target: f64) -> usize {
    (0..x.len())
        .min_by(|&a, &b| {
            (x.row(a)[0] - target)
                .abs()
                .total_cmp(&(x.row(b)[0] - target).abs())
        })
        .expect("samples are nonempty")
}

struct TreeTruth {
    modes: Vec<f64>,
    peak: f64,
    saddles: Vec<f64>,
}

fn tree_truth(m: &MixtureDensity) -> Result<TreeTruth> {
    let modes = m.true_modes(&[(-10.0, 20.0)], 0.01)?.as_slice().to_vec();
    let peak = modes.iter().map(|&c| m.pdf(&[c])).fold(0.0, f64::max);
    let saddles = modes
        .windows(2)
        .map(|w| m.saddle_level_1d(w[0], w[1]))
        .collect::<Result<_>>()?;
    Ok(TreeTruth {
        modes,
        peak,
        saddles,
    })
}

fn tree_for(m: &MixtureDensity, n: usize, seed: u64) -> Result<(PointSet, ClusterTree)> {
    let x = m.sample(n, seed);
    let h = recommended_bandwidth(n, 1, TREE_BANDWIDTH_SCALE)?;
    let tau = tau_schedule(n, 1, TREE_TAU_SCALE)?;
    let forest = quickshift(&x, &DensityModel::gaussian(h, 1)?, tau)?;
    let tree = ClusterTree::from_forest(&forest, &x)?;
    Ok((x, tree))
}

fn merge_error(truth: &TreeTruth, x: &PointSet, tree: &ClusterTree) -> f64 {
    let a = nearest_sample(x, truth.modes[0]);
    let b = nearest_sample(x, truth.modes[1]);
    match tree.merge_height(a, b) {
        MergeHeight::Level(v) => (v - truth.saddles[0]).abs() / truth.saddles[0],
        MergeHeight::Never => f64::INFINITY,
    }
}

fn cluster_tree_levels(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let m = mixture("trimodal");
    let truth = tree_truth(&m)?;
    let lambda = 0.6 * truth.peak;
    let seeds = config.seed_list();
    let (mut minimal_hits, mut separated_hits) = (0, 0);
    let mut merge_errors = Vec::new();
    let mut per_seed = Vec::new();
    for (k, &seed) in seeds.iter().enumerate() {
        let (x, tree) = tree_for(&m, 4000, seed)?;
        let n = x.len();

        let labels = tree.partition_at(lambda - 0.1 * lambda).labels(n);
        let minimal = true_components(&m, &x, lambda).iter().all(|comp| {
            let first = comp.first().map(|&i| labels[i]);
            comp.iter()
                .all(|&i| labels[i].is_some() && Some(labels[i]) == first)
        });

        let mut separated = true;
        for (s, &mu) in truth.saddles.iter().enumerate() {
            let level = mu + 0.15 * mu;
            let labels = tree.partition_at(level).labels(n);
            let comps = true_components(&m, &x, level);
            let owner = |mode: f64| {
                comps.iter().position(|c| {
                    let lo = c.iter().map(|&i| x.row(i)[0]).fold(f64::INFINITY, f64::min);
                    let hi = c
                        .iter()
                        .map(|&i| x.row(i)[0])
                        .fold(f64::NEG_INFINITY, f64::max);
                    mode >= lo && mode <= hi
                })
            };
            let (Some(ca), Some(cb)) = (owner(truth.modes[s]), owner(truth.modes[s + 1])) else {
                separated = false;
                continue;
            };
            let left: Vec<usize> = comps[ca].iter().filter_map(|&i| labels[i]).collect();
            separated &= ca != cb
                && comps[cb]
                    .iter()
                    .filter_map(|&i| labels[i])
                    .all(|l| !left.contains(&l));
        }

        minimal_hits += usize::from(minimal);
        separated_hits += usize::from(separated);
        let err = (k < 10).then(|| merge_error(&truth, &x, &tree));
        if let Some(e) = err {
            merge_errors.push(e);
        }
        per_seed.push(json!({ "seed": seed, "minimality": minimal, "separation": separated, "merge_error": err }));
    }
    let trend = config.trend_seeds();
    let errors_at = |n: usize| -> Result<Vec<f64>> {
        trend
            .iter()
            .map(|&s| tree_for(&m, n, s).map(|(x, t)| merge_error(&truth, &x, &t)))
            .collect()
    };
    let (small, large) = (errors_at(500)?, errors_at(8000)?);
    let merge_median = median(&merge_errors);
    let (med_small, med_large) = (median(&small), median(&large));
    let passed = enough(minimal_hits, seeds.len(), 0.9)
        && enough(separated_hits, seeds.len(), 0.9)
        && merge_median <= 0.25
        && med_small.is_finite()
        && med_large < med_small;
    let summary = format!(
        "minimality {minimal_hits}/{0}, separation {separated_hits}/{0}; merge height relative error \
         median {merge_median:.3} (n=4000), {med_small:.3} (n=500) -> {med_large:.3} (n=8000)",
        seeds.len()
    );
    let metrics = json!({
        "modes": truth.modes,
        "peak": truth.peak,
        "saddle_levels": truth.saddles,
        "lambda": lambda,
        "bandwidth_scale": TREE_BANDWIDTH_SCALE,
        "tau_scale": TREE_TAU_SCALE,
        "per_seed": per_seed,
        "merge_error_median": merge_median,
        "trend_seeds": trend,
        "merge_errors_n500": small,
        "merge_errors_n8000": large,
    });
    Ok((passed, summary, metrics))
}

const MODAL_QUERIES: [f64; 3] = [0.25, 0.5, 0.75];

/// Hausdorff error of each query at sample size `n`.
fn modal_errors(n: usize, seed: u64) -> Result<Vec<f64>> {
    let c = catalog_conditional("bimodal-conditional").expect("catalog entry exists");
    let truth = PointSet::from_column(&c.conditional_modes()?);
    let data = c.sample(n, seed);
    let model = DensityModel::gaussian(recommended_bandwidth(n, 2, 1.0)?, 2)?;
    MODAL_QUERIES
        .iter()
        .map(|&q| {
            let r = modal_regression(&data, &model, 0.5, &[q])?;
            hausdorff(&PointSet::from_column(&r.mode_estimates), &truth)
        })
        .collect()
}

fn modal_regression_consistency(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let seeds = config.seed_list();
    let mut errors = Vec::new();
    let mut hits = [0usize; MODAL_QUERIES.len()];
    for &seed in &seeds {
        let e = modal_errors(6000, seed)?;
        for (h, v) in hits.iter_mut().zip(&e) {
            *h += usize::from(*v < 0.3);
        }
        errors.push(e);
    }
    let trend = config.trend_seeds();
    let mean_error = |n: usize| -> Result<Vec<f64>> {
        trend
            .iter()
            .map(|&s| modal_errors(n, s).map(|e| e.iter().sum::<f64>() / e.len() as f64))
            .collect()
    };
    let (small, large) = (mean_error(1000)?, mean_error(8000)?);
    let (med_small, med_large) = (median(&small), median(&large));
    let passed = hits.iter().all(|&h| enough(h, seeds.len(), 0.8)) && med_large < med_small;
    let summary = format!(
        "n=6000 seeds with Hausdorff < 0.3 per query {hits:?} of {}; median error {med_small:.4} \
         (n=1000) -> {med_large:.4} (n=8000)",
        seeds.len()
    );
    let metrics = json!({
        "queries": MODAL_QUERIES,
        "seeds": seeds,
        "hausdorff_n6000": errors,
        "hits_per_query": hits,
        "trend_seeds": trend,
        "mean_error_n1000": small,
        "mean_error_n8000": large,
    });
    Ok((passed, summary, metrics))
}

fn sup_error(m: &MixtureDensity, grid: &PointSet, n: usize, seed: u64) -> Result<f64> {
    let x = m.sample(n, seed);
    let model = DensityModel::gaussian(rate_bandwidth(n, 1), 1)?;
    let est = kde_evaluate(&model, &x, grid)?;
    Ok(grid
        .rows()
        .zip(est)
        .map(|(g, e)| (e - m.pdf(g)).abs())
        .fold(0.0, f64::max))
}

fn kde_rate(config: &SuiteConfig) -> Result<(bool, String, Value)> {
    let m = mixture("two-gaussian-10sep");
    let grid = PointSet::from_column(
        &(0..=1600)
            .map(|k| -3.0 + 0.01 * k as f64)
            .collect::<Vec<_>>(),
    );
    let seeds = config.seed_list();
    let small: Vec<f64> = seeds
        .iter()
        .map(|&s| sup_error(&m, &grid, 500, s))
        .collect::<Result<_>>()?;
    let large: Vec<f64> = seeds
        .iter()
        .map(|&s| sup_error(&m, &grid, 16000, s))
        .collect::<Result<_>>()?;
    let (med_small, med_large) = (median(&small), median(&large));
    let passed = med_large < med_small;
    let summary = format!("median sup error {med_small:.4} (n=500) -> {med_large:.4} (n=16000)");
    let metrics = json!({ "seeds": seeds, "sup_error_n500": small, "sup_error_n16000": large });
    Ok((passed, summary, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_scale_with_seed_count() {
        assert!(enough(18, 20, 0.9));
        assert!(!enough(17, 20, 0.9));
        assert!(enough(16, 20, 0.8));
        assert!(enough(1, 1, 0.9));
        assert!(!enough(0, 1, 0.8));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn instances_are_reproducible() {
        let a = random_instance(17);
        let b = random_instance(17);
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.density, b.density);
    }

    #[test]
    fn superlevel_intervals_of_two_modes() {
        let m = mixture("two-gaussian-10sep");
        let iv = superlevel_intervals(&m, 0.1, (-5.0, 15.0), 1e-3);
        assert_eq!(iv.len(), 2);
        assert!(iv[0].0 < 0.0 && iv[0].1 > 0.0 && iv[1].0 < 10.0 && iv[1].1 > 10.0);
    }

    #[test]
    fn names_resolve() {
        assert_eq!(experiment("segmentation").unwrap().id, 4);
        assert!(experiment("nope").is_none());
    }
}
