use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use growthlab::density::{density_summary, EstimatorConfig, IntervalFunction};
use growthlab::{AtomicMeasure, ComplexPoint, FunctionModel, Genus, QuadSpec};

fn measures(c: &mut Criterion) {
    let mu = AtomicMeasure::arithmetic("integers", 1.0, 1e6, true).unwrap();
    c.bench_function("l_submeasure 2e6 atoms", |b| {
        b.iter(|| mu.l_submeasure(black_box(3.0), black_box(5e5)).unwrap())
    });
    c.bench_function("breve_l_rh 2e6 atoms", |b| {
        b.iter(|| mu.breve_l_rh(black_box(3.0), black_box(5e5)).unwrap())
    });
}

fn circle_means(c: &mut Criterion) {
    let zeros = Arc::new(AtomicMeasure::arithmetic("zeros", 1.0, 1e4, true).unwrap());
    let model = FunctionModel::canonical_product(zeros, Genus::One);
    let sine = FunctionModel::log_abs_sin_pi();
    let z = ComplexPoint::new(0.3, 0.7);
    c.bench_function("circle mean jensen", |b| {
        b.iter(|| model.circle_avg_jensen(black_box(z), 50.0).unwrap())
    });
    c.bench_function("circle mean quadrature 4096", |b| {
        b.iter(|| sine.circle_avg_quadrature(black_box(z), 50.0, 4096).unwrap())
    });
    c.bench_function("j_imag sine 1..1e4", |b| {
        b.iter(|| sine.j_imag(black_box(1.0), 1e4, &QuadSpec::default()).unwrap())
    });
}

fn densities(c: &mut Criterion) {
    let mu = Arc::new(AtomicMeasure::arithmetic("half", 0.5, 1e5, true).unwrap());
    let l = IntervalFunction::submeasure(mu);
    let cfg = EstimatorConfig {
        r_max: 1e5,
        per_decade: 16,
        ..EstimatorConfig::default()
    };
    let mut g = c.benchmark_group("density");
    g.sample_size(10);
    g.bench_function("summary of l on half lattice", |b| b.iter(|| density_summary(&l, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, measures, circle_means, densities);
criterion_main!(benches);
