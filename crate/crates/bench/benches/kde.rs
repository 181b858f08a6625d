use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modeforest::kernels::kde_evaluate_truncated;
use modeforest::{kde_self_evaluate, DensityModel, KernelShape};
use modeforest_bench::{planar_samples, two_mode_samples};

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("kde_self_evaluate");
    for n in [500, 2000] {
        let samples = two_mode_samples(n);
        for shape in [KernelShape::Gaussian, KernelShape::Epanechnikov] {
            let model = DensityModel::new(shape, 0.3, 1).unwrap();
            group.bench_with_input(BenchmarkId::new(shape.name(), n), &samples, |b, s| {
                b.iter(|| kde_self_evaluate(&model, s).unwrap())
            });
        }
    }
    group.finish();
}

fn truncated(c: &mut Criterion) {
    let samples = planar_samples(4000);
    let model = DensityModel::gaussian(0.2, 2).unwrap();
    c.bench_function("kde_truncated_2d_4000", |b| {
        b.iter(|| kde_evaluate_truncated(&model, &samples, &samples, 6.0).unwrap())
    });
}

criterion_group!(benches, exact, truncated);
criterion_main!(benches);
