use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ldeconf_core::oscillation::{count_zeros, integrated_counting};
use ldeconf_core::presets::sector_power_disc_solution;
use num_complex::Complex64;

fn zeros(c: &mut Criterion) {
    let one = Complex64::new(1.0, 0.0);
    let g = sector_power_disc_solution(1.5, one, one).unwrap();
    let mut group = c.benchmark_group("zeros");
    group.sample_size(10);
    for r in [0.9, 0.99, 0.998] {
        group.bench_with_input(BenchmarkId::new("count", r), &r, |b, &r| {
            b.iter(|| count_zeros(black_box(&g), r).unwrap())
        });
    }
    for r in [0.9, 0.99] {
        group.bench_with_input(BenchmarkId::new("counting_function", r), &r, |b, &r| {
            b.iter(|| integrated_counting(black_box(&g), r).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, zeros);
criterion_main!(benches);
