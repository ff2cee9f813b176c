use std::f64::consts::PI;

use ldeconf_core::function::{ExprFunction, FnFunction};
use ldeconf_core::oscillation::{
    coefficient_integral, count_zeros_detailed, exp_sum_directions, image_side_integral,
    integrated_counting, jensen_mean, CoefficientContext, RadialGrid,
};
use ldeconf_core::presets::{
    exponential_ode, exponential_sum_problem, sector_power_disc_solution, sector_power_problem,
    sector_power_zero_moduli,
};
use ldeconf_core::{ComplexJet, ConformalMapSpec, Domain, Expr, LinearODE};
use num_complex::Complex64;
use proptest::prelude::*;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn counts_match_lattice_for_several_exponents() {
    for alpha in [1.25, 1.5, 1.75] {
        let g = sector_power_disc_solution(alpha, ONE, ONE).unwrap();
        for r in [0.3, 0.6, 0.8, 0.9, 0.95, 0.97, 0.99] {
            let count = count_zeros_detailed(&g, r).unwrap();
            assert_eq!(
                count.count,
                sector_power_zero_moduli(alpha, count.radius).len(),
                "alpha {alpha}, r {r}"
            );
        }
    }
}

/// `Π (z - z_j)` with its jet from the factored form.
fn product_of_factors(zeros: Vec<Complex64>) -> FnFunction {
    FnFunction::new(Domain::Plane, move |z, order| {
        let v = ComplexJet::variable(z, order);
        Ok(zeros
            .iter()
            .fold(ComplexJet::constant(z, ONE, order), |acc, &a| {
                &acc * &v.add_scalar(-a)
            }))
    })
}

fn zero_set() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (0.05..0.85f64, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t)),
        1..6,
    )
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(16) })]

    #[test]
    fn counting_functions_are_monotone(zeros in zero_set()) {
        let g = product_of_factors(zeros.clone());
        let n = integrated_counting(&g, 0.95).unwrap();
        prop_assert_eq!(n.zero_count(), zeros.len());
        let radii: Vec<f64> = (1..=40).map(|i| 0.95 * i as f64 / 40.0).collect();
        let records = n.records(&radii);
        for pair in records.windows(2) {
            prop_assert!(pair[1].n >= pair[0].n);
            prop_assert!(pair[1].big_n >= pair[0].big_n);
        }
        for rec in &records {
            if rec.n == 0 {
                prop_assert_eq!(rec.big_n, 0.0);
            }
        }
    }

    #[test]
    fn jensen_formula_matches_counting(zeros in zero_set(), r in 0.3..0.95f64) {
        let g = product_of_factors(zeros.clone());
        prop_assume!(zeros.iter().all(|z| (z.norm() - r).abs() > 0.01));
        let n = integrated_counting(&g, r).unwrap();
        let mean = jensen_mean(&g, r, 1024).unwrap();
        let big_n = n.big_n(r);
        prop_assert!((mean - big_n).abs() <= 1e-3 * big_n.max(1e-3), "{} vs {}", mean, big_n);
    }

    #[test]
    fn interior_roots_do_not_change_directions(
        hull in prop::collection::vec((0.5..2.0f64, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t)), 3..6),
        weights in prop::collection::vec(prop::collection::vec(0.01..1.0f64, 6), 1..4),
    ) {
        let before = exp_sum_directions(&hull).unwrap();
        let mut roots = hull.clone();
        for w in &weights {
            // strict convex combinations lie inside the hull
            let total: f64 = w[..hull.len()].iter().sum();
            roots.push(hull.iter().zip(w).map(|(p, x)| p * (x / total)).sum());
        }
        let after = exp_sum_directions(&roots).unwrap();
        prop_assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn jensen_for_the_sector_sum() {
    let g = sector_power_disc_solution(1.5, ONE, ONE).unwrap();
    for r in [0.5, 0.8, 0.9] {
        let n = integrated_counting(&g, r).unwrap();
        let mean = jensen_mean(&g, r, 4096).unwrap();
        assert!(
            (mean - n.big_n(r)).abs() <= 1e-3 * n.big_n(r).max(1e-3),
            "r {r}: {mean} vs {}",
            n.big_n(r)
        );
    }
}

#[test]
fn image_side_matches_disc_side() {
    let mobius = ConformalMapSpec::Mobius {
        a: c(1.0, 0.5),
        b: c(0.2, 0.0),
        c: c(0.3, -0.2),
        d: c(1.0, 0.4),
    };
    let sector = ConformalMapSpec::Sector {
        alpha: 1.5,
        phi: 0.4,
    };
    let poly = LinearODE::from_exprs(
        3,
        vec![
            Expr::Polynomial {
                coeffs: vec![c(1.0, 0.0), c(0.5, 0.5), c(0.2, 0.0)],
            },
            Expr::Polynomial {
                coeffs: vec![c(-0.3, 1.0), c(0.0, 0.4)],
            },
        ],
        Domain::Plane,
    )
    .unwrap();
    let exp = exponential_ode(&[c(2.0, 0.0), c(-1.0, 0.3), c(-1.0, -0.3)]).unwrap();
    for (ode, map) in [(poly.clone(), mobius), (poly, sector), (exp, sector)] {
        let ctx = CoefficientContext::Pullback {
            ode: ode.clone(),
            map,
        };
        for j in 0..2 {
            for r in [0.5, 0.9, 0.99] {
                let disc = coefficient_integral(&ctx, j, r).unwrap();
                let image = image_side_integral(&ode, &map, j, r).unwrap();
                assert!(
                    (disc - image).abs() <= 0.01 * disc,
                    "{} j {j} r {r}: {disc} vs {image}",
                    map.name()
                );
            }
        }
    }
}

#[test]
fn exponent_ordering_on_shipped_examples() {
    let grid = RadialGrid::geometric(0.5, 0.998, 24, 0.5).unwrap();
    let problems = [
        ("sector power", sector_power_problem(1.5).unwrap()),
        (
            "exponential sum",
            exponential_sum_problem(
                ConformalMapSpec::Sector {
                    alpha: 1.5,
                    phi: 0.0,
                },
                &[c(2.0, 0.0), c(-1.0, 0.3), c(-1.0, -0.3)],
            )
            .unwrap(),
        ),
    ];
    for (name, problem) in problems {
        let report = problem.report(&grid).unwrap();
        for row in &report.rows {
            assert!(row.rhs_n_sum >= 0.0 && row.rhs_cross_sum >= 0.0 && row.log2_term >= 0.0);
            assert!(row.s_r > row.r && row.s_r < 1.0);
        }
        // the LHS exponents decrease and the RHS exponent increases towards the circle
        let e = report.exponents_within(0.98, 0.998);
        println!("{name}: {e:?}");
        let rhs = e.rhs_total.unwrap();
        for lhs in &e.integrals {
            assert!(lhs.unwrap() <= rhs + 0.1, "{name}: {e:?}");
        }
    }
}

#[test]
fn zero_free_constant_has_no_counts() {
    let g = ExprFunction::new(Expr::Constant { value: c(2.0, 1.0) }, Domain::Plane).unwrap();
    let n = integrated_counting(&g, 0.9).unwrap();
    assert_eq!(n.zero_count(), 0);
    assert_eq!(n.big_n(0.9), 0.0);
}
