//! Data-parallel kernels on the global rayon pool versus a one-thread pool.
//! Build with `--no-default-features` to time the sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mfunc_core::density::{default_grid, m_sigma_p, torus_histogram, ConstructionOptions, DensityMethod};
use mfunc_core::fourier::lambda_coefficients;
use mfunc_core::Complex64;
use std::hint::black_box;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("pool", all), ("single", one)]
}

fn kernels(c: &mut Criterion) {
    let primes = [2, 3, 5, 7, 11];
    let spec = default_grid(&primes, 1.0, 128).unwrap();
    let opts = ConstructionOptions::default();
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_with_input(BenchmarkId::new("fourier_inversion_128", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| m_sigma_p(black_box(&primes), 1.0, spec, DensityMethod::FourierInversion, &opts).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("torus_histogram_2^18", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| torus_histogram(black_box(&primes), 1.0, 1 << 18, 1, spec).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("lambda_coefficients_1e5", name), &pool, |b, pool| {
            b.iter(|| pool.install(|| lambda_coefficients(black_box(Complex64::new(3.0, 4.0)), 100_000).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
