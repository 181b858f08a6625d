use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modeforest::quickshift::{build_forest_with, NeighborSearch};
use modeforest::{kde_self_evaluate, ClusterTree, DensityModel};
use modeforest_bench::two_mode_samples;

fn forest(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_forest");
    let samples = two_mode_samples(4000);
    let density = kde_self_evaluate(&DensityModel::gaussian(0.2, 1).unwrap(), &samples).unwrap();
    for (name, search) in [
        ("grid", NeighborSearch::Grid),
        ("brute", NeighborSearch::BruteForce),
    ] {
        group.bench_function(BenchmarkId::new(name, 4000), |b| {
            b.iter(|| build_forest_with(&samples, &density, 0.5, search).unwrap())
        });
    }
    group.finish();
}

fn tree(c: &mut Criterion) {
    let samples = two_mode_samples(4000);
    let density = kde_self_evaluate(&DensityModel::gaussian(0.2, 1).unwrap(), &samples).unwrap();
    let forest = build_forest_with(&samples, &density, 0.2, NeighborSearch::Auto).unwrap();
    c.bench_function("cluster_tree_4000", |b| {
        b.iter(|| ClusterTree::from_forest(&forest, &samples).unwrap())
    });
}

criterion_group!(benches, forest, tree);
criterion_main!(benches);
