//! Compares the rayon-parallel execution mode against the sequential
//! fallback on the three heaviest code paths. Run with
//! `cargo bench -p htype-core`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use htype_core::exec::Mode;
use htype_core::grid::{Grid1, GridFunction1};
use htype_core::twisted::{project_lambda, twisted_convolution};

fn modes() -> Vec<(&'static str, Mode)> {
    let mut v = vec![("sequential", Mode::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Mode::Parallel));
    }
    v
}

fn bench_twisted_convolution(c: &mut Criterion) {
    let grid = Grid1::new(2, 8.0, 61).unwrap();
    let f = GridFunction1::sample(grid.clone(), Mode::Sequential, |z| {
        Complex64::new((-(z[0] * z[0] + z[1] * z[1]) / 2.0).exp(), 0.0)
    });
    let mut group = c.benchmark_group("twisted_convolution_61");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| twisted_convolution(&f, &f, 1.0, mode).unwrap());
        });
    }
    group.finish();
}

fn bench_projection(c: &mut Criterion) {
    let grid = Grid1::new(2, 8.0, 61).unwrap();
    let g = GridFunction1::sample(grid.clone(), Mode::Sequential, |z| {
        Complex64::new(
            (-(z[0] * z[0] + z[1] * z[1]) / 2.0).exp() * (1.0 + z[0]),
            0.1 * z[1],
        )
    });
    let mut group = c.benchmark_group("project_lambda_61");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| project_lambda(1, 1.0, &g, mode).unwrap());
        });
    }
    group.finish();
}

fn bench_grid_sampling(c: &mut Criterion) {
    let grid = Grid1::new(2, 9.0, 257).unwrap();
    let mut group = c.benchmark_group("matrix_coefficient_sample_257");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                htype_core::twisted::sample_matrix_coefficient(&grid, &[1], &[0], 1.0, mode)
                    .unwrap()
            });
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_twisted_convolution,
    bench_projection,
    bench_grid_sampling
);
criterion_main!(benches);
