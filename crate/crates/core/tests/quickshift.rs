use modeforest::quickshift::{build_forest_with, NeighborSearch};
use modeforest::synthetic::{catalog_mixture, MixtureDensity};
use modeforest::verify::{check_forest, naive_assignments, reachable};
use modeforest::{
    assignments, build_forest, directed_path_exists, modes, quickshift, DensityModel, PointSet,
};
use proptest::prelude::*;

fn two_clusters(seed: u64) -> PointSet {
    let left = MixtureDensity::univariate(&[(1.0, 0.0, 0.5)])
        .unwrap()
        .sample(100, seed);
    let right = MixtureDensity::univariate(&[(1.0, 10.0, 0.5)])
        .unwrap()
        .sample(100, seed + 10_000);
    let values: Vec<f64> = left
        .as_slice()
        .iter()
        .chain(right.as_slice())
        .copied()
        .collect();
    PointSet::from_column(&values)
}

#[test]
fn build_forest_examples() {
    let x = PointSet::from_column(&[0.0, 1.0, 3.0]);
    let density = [0.5, 0.9, 0.7];
    let forest = build_forest(&x, &density, 1.5).unwrap();
    assert_eq!(forest.parents(), &[Some(1), None, None]);
    assert_eq!(modes(&forest, &x).indices, vec![1, 2]);
    let forest = build_forest(&x, &density, f64::INFINITY).unwrap();
    assert_eq!(forest.parents(), &[Some(1), None, Some(1)]);
    assert_eq!(modes(&forest, &x).indices, vec![1]);
    let forest = build_forest(&x, &[0.2; 3], f64::INFINITY).unwrap();
    assert_eq!(forest.roots(), vec![0, 1, 2]);
    assert!(build_forest(&x, &[0.1, 0.2], 1.0).is_err());
}

#[test]
fn single_sample_is_its_own_root() {
    let x = PointSet::from_column(&[4.2]);
    let forest = quickshift(&x, &DensityModel::gaussian(1.0, 1).unwrap(), 1.0).unwrap();
    assert_eq!(forest.parents(), &[None]);
    assert_eq!(assignments(&forest), vec![0]);
}

#[test]
fn two_separated_clusters_give_two_roots() {
    let model = DensityModel::gaussian(0.5, 1).unwrap();
    let mut hits = 0;
    for seed in 0..20 {
        let x = two_clusters(seed);
        let forest = quickshift(&x, &model, 1.0).unwrap();
        let found = modes(&forest, &x);
        if found.len() != 2 {
            continue;
        }
        let mut c: Vec<f64> = found.coordinates.as_slice().to_vec();
        c.sort_by(f64::total_cmp);
        if c[0].abs() < 0.5 && (c[1] - 10.0).abs() < 0.5 {
            hits += 1;
        }
    }
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn infinite_tau_leaves_only_the_density_argmax() {
    let x = catalog_mixture("far-pair").unwrap().sample(300, 8);
    let model = DensityModel::gaussian(0.7, 1).unwrap();
    let forest = quickshift(&x, &model, f64::INFINITY).unwrap();
    let density = forest.density();
    let argmax = (0..x.len())
        .max_by(|&a, &b| density[a].total_cmp(&density[b]))
        .unwrap();
    assert_eq!(forest.roots(), vec![argmax]);
    assert_eq!(modes(&forest, &x).len(), 1);
}

#[test]
fn assignment_examples() {
    let x = PointSet::from_column(&[0.0, 1.0, 3.0]);
    let forest = build_forest(&x, &[0.5, 0.9, 0.7], f64::INFINITY).unwrap();
    assert_eq!(assignments(&forest), vec![1, 1, 1]);
    assert!(directed_path_exists(&forest, 0, 1));
    assert!(!directed_path_exists(&forest, 0, 2));
    let flat = build_forest(&x, &[1.0, 1.0, 1.0], f64::INFINITY).unwrap();
    assert_eq!(assignments(&flat), vec![0, 1, 2]);
}

#[test]
fn separated_samples_have_no_connecting_path() {
    // Centers 0 and 10, sd 0.5, n = 400, h = 0.5, tau = 1: pairs on opposite
    // sides of the valley at 5 (a < 3, b > 7) must never be joined.
    let m = catalog_mixture("two-gaussian-10sep").unwrap();
    let model = DensityModel::gaussian(0.5, 1).unwrap();
    for seed in 0..20 {
        let x = m.sample(400, seed);
        let forest = quickshift(&x, &model, 1.0).unwrap();
        let left: Vec<usize> = (0..400).filter(|&i| x.row(i)[0] < 3.0).collect();
        let right: Vec<usize> = (0..400).filter(|&i| x.row(i)[0] > 7.0).collect();
        for &a in &left {
            for &b in &right {
                assert!(
                    !directed_path_exists(&forest, a, b),
                    "seed {seed}: {a} -> {b}"
                );
                assert!(
                    !directed_path_exists(&forest, b, a),
                    "seed {seed}: {b} -> {a}"
                );
            }
        }
    }
}

fn instance() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (1usize..=3, 1usize..=120).prop_flat_map(|(d, n)| {
        (
            Just(d),
            prop::collection::vec((0i32..12).prop_map(|v| v as f64 * 0.25), n * d),
            prop::collection::vec((0i32..6).prop_map(f64::from), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn forests_satisfy_every_invariant((d, xs, density) in instance(), tau in 0.1f64..3.0) {
        let x = PointSet::new(d, xs).unwrap();
        for search in [NeighborSearch::Auto, NeighborSearch::Grid, NeighborSearch::BruteForce] {
            let forest = build_forest_with(&x, &density, tau, search).unwrap();
            prop_assert!(check_forest(&forest, &x).is_empty());
        }
    }

    #[test]
    fn density_strictly_increases_toward_roots((d, xs, density) in instance(), tau in 0.1f64..3.0) {
        let x = PointSet::new(d, xs).unwrap();
        let forest = build_forest(&x, &density, tau).unwrap();
        for i in 0..x.len() {
            let path = reachable(forest.parents(), i);
            prop_assert!(path.windows(2).all(|w| density[w[1]] > density[w[0]]));
            prop_assert!(path.len() <= x.len());
        }
    }

    #[test]
    fn assignments_and_paths_match_walks((d, xs, density) in instance(), tau in 0.1f64..3.0) {
        let x = PointSet::new(d, xs).unwrap();
        let forest = build_forest(&x, &density, tau).unwrap();
        prop_assert_eq!(assignments(&forest), naive_assignments(forest.parents()));
        for i in 0..x.len() {
            let reach = reachable(forest.parents(), i);
            for j in 0..x.len() {
                prop_assert_eq!(directed_path_exists(&forest, i, j), reach.contains(&j));
            }
        }
    }

    #[test]
    fn growing_tau_only_removes_roots((d, xs, density) in instance(), a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        let x = PointSet::new(d, xs).unwrap();
        let narrow = build_forest(&x, &density, small).unwrap();
        let wide = build_forest(&x, &density, large).unwrap();
        let narrow_roots = narrow.roots();
        prop_assert!(wide.roots().iter().all(|r| narrow_roots.contains(r)));
        for i in 0..x.len() {
            if let Some(p) = narrow.parent(i) {
                prop_assert_eq!(wide.parent(i), Some(p));
            }
        }
    }
}
