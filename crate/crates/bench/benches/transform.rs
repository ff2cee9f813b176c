use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ldeconf_core::solve::{canonical_basis, SolverConfig};
use ldeconf_core::transform::transformed_coefficient_jets;
use ldeconf_core::{ConformalMapSpec, Domain, Expr, LinearODE};
use num_complex::Complex64;

fn polynomial_ode(k: usize) -> LinearODE {
    let exprs = (0..k - 1)
        .map(|j| Expr::Polynomial {
            coeffs: vec![
                Complex64::new(1.0 + j as f64, 0.0),
                Complex64::new(0.0, 0.5),
            ],
        })
        .collect();
    LinearODE::from_exprs(k, exprs, Domain::Plane).unwrap()
}

fn transform(c: &mut Criterion) {
    let z = Complex64::new(0.4, -0.3);
    let map = ConformalMapSpec::Sector {
        alpha: 1.5,
        phi: 0.3,
    };
    let mut group = c.benchmark_group("transform");
    for k in [2, 3, 4, 6] {
        let ode = polynomial_ode(k);
        group.bench_with_input(BenchmarkId::new("coefficient_jets", k), &k, |b, _| {
            b.iter(|| transformed_coefficient_jets(black_box(&ode), &map, z, 4).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("solve");
    for k in [2, 4] {
        let ode = polynomial_ode(k);
        group.bench_with_input(BenchmarkId::new("fresh_basis_at_2", k), &k, |b, _| {
            b.iter(|| {
                let basis =
                    canonical_basis(&ode, Complex64::new(0.0, 0.0), SolverConfig::default())
                        .unwrap();
                basis
                    .iter()
                    .map(|f| f.value_at(Complex64::new(2.0, 1.0)).unwrap())
                    .sum::<Complex64>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, transform);
criterion_main!(benches);
