//! Power-product solution bases and Wronskian identities.
//!
//! If `f_1, f_2` solve `f'' + a f = 0`, the `k` products
//! `f_1^{k-1-m} f_2^m` are independent solutions of a normalized order-`k`
//! equation. Its coefficients are found pointwise by requiring the first
//! `k-1` products to be solutions; the last product serves as a check.

use std::sync::Arc;

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Func};
use crate::jet::ComplexJet;
use crate::linalg::{determinant, solve};
use crate::ode::LinearODE;
use crate::solve::{SolutionEvaluator, SolverConfig};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance on the equation of the last product.
pub const CONSISTENCY_TOL: f64 = 1e-7;

/// `c_k = Π_{j=2}^{k-1} j^{k-j}`.
pub fn wronskian_constant(k: usize) -> u128 {
    (2..k).map(|j| (j as u128).pow((k - j) as u32)).product()
}

/// `s_k = k(k-1)/2`.
pub fn wronskian_exponent(k: usize) -> usize {
    k * (k - 1) / 2
}

/// `(k-1) k (k+1) / 6`, the factor relating `a_{k-2}` to `a`.
pub fn leading_factor(k: usize) -> usize {
    (k - 1) * k * (k + 1) / 6
}

/// Determinant of `[g_i^(j)(z)]`, `j = 0..n-1`.
pub fn wronskian(functions: &[Func], z: Complex64) -> Result<Complex64> {
    let n = functions.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty function list".into()));
    }
    let cols = functions
        .iter()
        .map(|g| Ok(g.jet_at(z, n - 1)?.derivative_values()))
        .collect::<Result<Vec<_>>>()?;
    let matrix: Vec<Vec<Complex64>> = (0..n)
        .map(|j| cols.iter().map(|c| c[j]).collect())
        .collect();
    determinant(&matrix)
}

/// `f_1^p f_2^q`.
struct PowerProduct {
    f1: Func,
    f2: Func,
    p: u32,
    q: u32,
}

impl AnalyticFunction for PowerProduct {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        let a = self.f1.jet_at(z, order)?.powi(self.p);
        let b = self.f2.jet_at(z, order)?.powi(self.q);
        Ok(&a * &b)
    }

    fn domain(&self) -> Domain {
        self.f1.domain()
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.f1.radius_hint(z).min(self.f2.radius_hint(z))
    }
}

/// Coefficients `a_0..a_{k-2}` of the equation satisfied by the products.
struct ProductCoefficients {
    products: Vec<Func>,
}

impl ProductCoefficients {
    fn solve_at(&self, z: Complex64, order: usize) -> Result<Vec<ComplexJet>> {
        let k = self.products.len();
        let jets = self
            .products
            .iter()
            .map(|p| p.jet_at(z, order + k))
            .collect::<Result<Vec<_>>>()?;
        let derivs: Vec<Vec<ComplexJet>> = jets
            .iter()
            .map(|j| {
                (0..=k)
                    .map(|m| Ok(j.derivative(m)?.truncate(order)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        // row m: Σ_j a_j P_m^(j) = -P_m^(k), j = 0..k-2
        let matrix: Vec<Vec<ComplexJet>> = derivs[..k - 1]
            .iter()
            .map(|d| d[..k - 1].to_vec())
            .collect();
        let rhs: Vec<ComplexJet> = derivs[..k - 1].iter().map(|d| -&d[k]).collect();
        let a = solve(&matrix, &rhs)?;
        // the last product must satisfy the same equation
        let check = &derivs[k - 1];
        let mut sum = check[k].value();
        let mut scale = sum.norm();
        for (j, aj) in a.iter().enumerate() {
            let t = aj.value() * check[j].value();
            scale = scale.max(t.norm());
            sum += t;
        }
        if sum.norm() > CONSISTENCY_TOL * scale {
            return Err(Error::Breakdown(format!(
                "product basis inconsistent at {z}: relative defect {:e}",
                sum.norm() / scale
            )));
        }
        Ok(a)
    }
}

struct ProductCoefficient {
    core: Arc<ProductCoefficients>,
    index: usize,
}

impl AnalyticFunction for ProductCoefficient {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        Ok(self.core.solve_at(z, order)?.swap_remove(self.index))
    }

    fn domain(&self) -> Domain {
        self.core.products[0].domain()
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.core.products[0].radius_hint(z)
    }
}

/// `f_1, f_2`, their `k` power products and the equation they solve.
pub struct PowerBasis {
    pub k: usize,
    pub f1: Func,
    pub f2: Func,
    pub products: Vec<Func>,
    pub ode: LinearODE,
}

impl PowerBasis {
    /// `(W(products)(z), c_k W(f_1, f_2)(z)^{s_k})`.
    pub fn wronskian_identity(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let lhs = wronskian(&self.products, z)?;
        let w2 = wronskian(&[self.f1.clone(), self.f2.clone()], z)?;
        let rhs = w2.powu(wronskian_exponent(self.k) as u32) * wronskian_constant(self.k) as f64;
        Ok((lhs, rhs))
    }
}

/// Builds the power basis from solutions of `f'' + a f = 0` with
/// `(f_i(z0), f_i'(z0)) = ics[i]`.
pub fn power_basis(
    a: Func,
    k: usize,
    z0: Complex64,
    ics: [(Complex64, Complex64); 2],
    config: SolverConfig,
) -> Result<PowerBasis> {
    if k < 2 {
        return Err(Error::InvalidOde(format!("order {k} must be at least 2")));
    }
    let domain = a.domain();
    let w = ics[0].0 * ics[1].1 - ics[0].1 * ics[1].0;
    let size = ics
        .iter()
        .map(|(x, y)| x.norm().max(y.norm()))
        .fold(0.0, f64::max);
    if !(w.norm() > 1e-14 * size * size) {
        return Err(Error::Singular(w.norm()));
    }
    let second = LinearODE::new(2, vec![a], domain)?;
    let f1 = SolutionEvaluator::new(second.clone(), z0, &[ics[0].0, ics[0].1], config)?.shared();
    let f2 = SolutionEvaluator::new(second, z0, &[ics[1].0, ics[1].1], config)?.shared();
    from_pair(f1, f2, k)
}

/// Power basis from two given independent solutions of a second-order equation.
pub fn from_pair(f1: Func, f2: Func, k: usize) -> Result<PowerBasis> {
    let domain = f1.domain();
    let products: Vec<Func> = (0..k as u32)
        .map(|m| {
            Arc::new(PowerProduct {
                f1: f1.clone(),
                f2: f2.clone(),
                p: k as u32 - 1 - m,
                q: m,
            }) as Func
        })
        .collect();
    let core = Arc::new(ProductCoefficients {
        products: products.clone(),
    });
    let coeffs = (0..k - 1)
        .map(|index| {
            Arc::new(ProductCoefficient {
                core: core.clone(),
                index,
            }) as Func
        })
        .collect();
    let ode = LinearODE::new(k, coeffs, domain)?;
    Ok(PowerBasis {
        k,
        f1,
        f2,
        products,
        ode,
    })
}

/// A point inside `domain` used as base point for canonical initial data.
pub fn base_point(domain: Domain) -> Complex64 {
    match domain {
        Domain::Plane | Domain::Disc => ZERO,
        Domain::RightHalfPlane => ONE,
        Domain::Image(t) => t.eval(ZERO).unwrap_or(ZERO),
    }
}

/// `(W(products)(z), c_k W(f_1,f_2)(z)^{s_k})` for the canonical pair
/// `f_1(z0) = 1, f_1'(z0) = 0`, `f_2(z0) = 0, f_2'(z0) = 1`.
pub fn wronskian_identity_check(a: Func, k: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    let z0 = base_point(a.domain());
    let basis = power_basis(
        a,
        k,
        z0,
        [(ONE, ZERO), (ZERO, ONE)],
        SolverConfig::default(),
    )?;
    basis.wronskian_identity(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{Expr, FnFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_fn(rate: Complex64) -> Func {
        FnFunction::new(Domain::Plane, move |z, order| {
            Ok(ComplexJet::variable(z, order).scale(rate).exp())
        })
        .shared()
    }

    #[test]
    fn constants() {
        assert_eq!(wronskian_constant(2), 1);
        assert_eq!(wronskian_constant(3), 2);
        assert_eq!(wronskian_constant(4), 12);
        assert_eq!(wronskian_exponent(4), 6);
        assert_eq!(leading_factor(5), 20);
    }

    #[test]
    fn exponential_wronskians() {
        let (e1, e2) = (exp_fn(c(0.0, 1.0)), exp_fn(c(0.0, -1.0)));
        let z = c(0.4, -1.1);
        assert!((wronskian(&[e1.clone(), e2.clone()], z).unwrap() - c(0.0, -2.0)).norm() < 1e-14);
        assert!(wronskian(&[e1.clone(), e1.clone()], z).unwrap().norm() < 1e-14);
        let basis = from_pair(e1, e2, 3).unwrap();
        assert!((wronskian(&basis.products, z).unwrap() - c(0.0, 16.0)).norm() < 1e-12);
    }

    #[test]
    fn third_order_coefficients_for_constant_a() {
        let a = Expr::Constant { value: ONE }
            .into_function(Domain::Plane)
            .unwrap();
        let basis = power_basis(
            a,
            3,
            ZERO,
            [(ONE, ZERO), (ZERO, ONE)],
            SolverConfig::default(),
        )
        .unwrap();
        let z = c(0.3, 0.2);
        let b = basis.ode.coefficient_values(z).unwrap();
        assert!((b[1] - c(4.0, 0.0)).norm() < 1e-10, "{b:?}");
        assert!(b[0].norm() < 1e-10, "{b:?}");
    }

    #[test]
    fn dependent_initial_data_rejected() {
        let a = Expr::Constant { value: ONE }
            .into_function(Domain::Plane)
            .unwrap();
        let r = power_basis(
            a,
            3,
            ZERO,
            [(ONE, ONE), (c(2.0, 0.0), c(2.0, 0.0))],
            SolverConfig::default(),
        );
        assert!(matches!(r, Err(Error::Singular(_))));
    }
}
