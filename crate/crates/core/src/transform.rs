//! Conformal change of variables for normalized linear equations.
//!
//! If `f` solves an order-`k` equation with coefficients `a_j` on `T(𝔻)`, then
//! `g = (f∘T) h` with `h = (T')^{(1-k)/2}` solves an equation of the same
//! normalized form on the disc. Expanding `g^(m)` with Faà di Bruno's formula
//! and matching the coefficient of `f^(ℓ)(T)` gives, for `ℓ = 0..=k-2`,
//!
//! ```text
//! b_ℓ + Σ_{j=ℓ+1}^{k-2} b_j S(j, ℓ) + S(k, ℓ) = (a_ℓ∘T) (T')^{k-ℓ},
//! S(m, ℓ) = Σ_{i=ℓ}^{m} C(m, i) B_{i,ℓ}(T', ..., T^{(i-ℓ+1)}) (T')^{-ℓ} h^{(m-i)} / h,
//! ```
//!
//! a unit upper-triangular system solved from `ℓ = k-2` downwards. The
//! coefficient of `f^(k-1)(T)` vanishes identically for this choice of `h`.

use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::bell::bell_polynomial_sum;
use crate::conformal::ConformalMapSpec;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Func};
use crate::jet::ComplexJet;
use crate::ode::LinearODE;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative jump of `h` between neighbouring path points treated as a branch change.
const BRANCH_JUMP_TOL: f64 = 0.1;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exponent `(1-k)/2` of the multiplier `h`.
pub fn multiplier_exponent(k: usize) -> f64 {
    (1.0 - k as f64) / 2.0
}

/// Jet of `h = (T')^{(1-k)/2}` at `z`, on the branch that is continuous on
/// the disc and principal at the origin. Needs a map jet of order `order + 1`.
pub fn multiplier_jet(
    map: &ConformalMapSpec,
    k: usize,
    z: Complex64,
    order: usize,
) -> Result<ComplexJet> {
    let dt = map.jet(z, order + 1)?.derivative(1)?;
    let log_dt = dt.ln_with_constant(map.log_derivative(z)?);
    let beta = multiplier_exponent(k);
    let h = log_dt.scale(Complex64::new(beta, 0.0)).exp();
    // cross-check with the power routine on the same sheet
    let via_pow = dt.powc(Complex64::new(beta, 0.0), Some(h.value()))?;
    debug_assert!((via_pow.value() - h.value()).norm() <= 1e-12 * h.value().norm());
    Ok(h)
}

/// Jets of the transformed coefficients `b_0, ..., b_{k-2}` at `z`.
pub fn transformed_coefficient_jets(
    ode: &LinearODE,
    map: &ConformalMapSpec,
    z: Complex64,
    order: usize,
) -> Result<Vec<ComplexJet>> {
    let k = ode.order();
    let tj = map.jet(z, order + k + 1)?;
    // T^{(m)} for m = 1..=k as jets of order `order`
    let mut dts = Vec::with_capacity(k);
    for m in 1..=k {
        dts.push(tj.derivative(m)?.truncate(order));
    }
    let dt = &dts[0];
    if dt.value() == Complex64::new(0.0, 0.0) {
        return Err(Error::Breakdown(format!("T' vanishes at {z}")));
    }
    let h = multiplier_jet(map, k, z, order + k)?;
    let h0 = h.truncate(order);
    let mut h_ratio = Vec::with_capacity(k + 1);
    for m in 0..=k {
        h_ratio.push(h.derivative(m)?.truncate(order).checked_div(&h0)?);
    }
    let inv_dt = dt.recip()?;
    let image = tj.value();
    let inner = tj.truncate(order);

    // S(m, ℓ) for m in ℓ+1..=k
    let s = |m: usize, l: usize| -> Result<ComplexJet> {
        let inv_pow = inv_dt.powi(l as u32);
        let mut acc = ComplexJet::constant(z, Complex64::new(0.0, 0.0), order);
        for i in l..=m {
            let bell = if i == 0 {
                ComplexJet::constant(z, ONE, order)
            } else if l == 0 {
                continue;
            } else {
                bell_polynomial_sum(i, l, &dts[..i - l + 1])?
            };
            let term = &(&bell * &inv_pow) * &h_ratio[m - i];
            acc = &acc + &term.scale(Complex64::new(binomial(m, i), 0.0));
        }
        Ok(acc)
    };

    let mut b: Vec<Option<ComplexJet>> = vec![None; k - 1];
    for l in (0..=k - 2).rev() {
        let a_outer = ode.coeff(l).jet_at(image, order)?;
        let pulled = ComplexJet::compose(&a_outer, &inner)?;
        let mut rhs = &pulled * &dt.powi((k - l) as u32);
        rhs = &rhs - &s(k, l)?;
        for j in l + 1..=k - 2 {
            let bj = b[j].as_ref().expect("filled in a previous pass");
            rhs = &rhs - &(bj * &s(j, l)?);
        }
        b[l] = Some(rhs);
    }
    Ok(b.into_iter()
        .map(|x| x.expect("all coefficients computed"))
        .collect())
}

/// Shared state of the coefficients of a transformed equation; remembers the
/// last evaluation because the solver asks for all coefficients at one point.
struct TransformCore {
    ode: LinearODE,
    map: ConformalMapSpec,
    last: Mutex<Option<(Complex64, usize, Vec<ComplexJet>)>>,
}

impl TransformCore {
    fn jets(&self, z: Complex64, order: usize) -> Result<Vec<ComplexJet>> {
        {
            let last = self.last.lock().expect("cache lock");
            if let Some((lz, lo, jets)) = last.as_ref() {
                if *lz == z && *lo >= order {
                    return Ok(jets.iter().map(|j| j.truncate(order)).collect());
                }
            }
        }
        let jets = transformed_coefficient_jets(&self.ode, &self.map, z, order)?;
        *self.last.lock().expect("cache lock") = Some((z, order, jets.clone()));
        Ok(jets)
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        let disc = 1.0 - z.norm();
        match (self.map.eval(z), self.map.derivative(z)) {
            (Ok(w), Ok(d)) => disc.min(self.ode.radius_hint(w) / (4.0 * d.norm())),
            _ => 0.0,
        }
    }
}

struct TransformedCoefficient {
    core: Arc<TransformCore>,
    index: usize,
}

impl AnalyticFunction for TransformedCoefficient {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        Ok(self.core.jets(z, order)?.swap_remove(self.index))
    }

    fn domain(&self) -> Domain {
        Domain::Disc
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.core.radius_hint(z)
    }
}

/// The equation satisfied on the disc by `(f∘T)(T')^{(1-k)/2}` when `f`
/// solves `ode` on `T(𝔻)`.
pub fn transform_ode(ode: &LinearODE, map: &ConformalMapSpec) -> Result<LinearODE> {
    map.validate()?;
    if !ode.domain().admits(map) {
        return Err(Error::DomainMismatch(format!(
            "{} image is not inside {:?}",
            map.name(),
            ode.domain()
        )));
    }
    let core = Arc::new(TransformCore {
        ode: ode.clone(),
        map: *map,
        last: Mutex::new(None),
    });
    let coeffs: Vec<Func> = (0..ode.order() - 1)
        .map(|index| {
            Arc::new(TransformedCoefficient {
                core: core.clone(),
                index,
            }) as Func
        })
        .collect();
    LinearODE::new(ode.order(), coeffs, Domain::Disc)
}

/// Second-order reference value `(a∘T)(T')^2 + S_T/2`.
pub fn second_order_coefficient(
    a: &dyn AnalyticFunction,
    map: &ConformalMapSpec,
    z: Complex64,
) -> Result<Complex64> {
    let w = map.eval(z)?;
    let d = map.derivative(z)?;
    Ok(a.value_at(w)? * d * d + map.schwarzian(z)? / 2.0)
}

/// The coefficient of `f^(k-1)(T)` in the expansion of `g^(k)`, namely
/// `k (T')^{k-1} h' + B_{k,k-1}(T', T'') h`, relative to the size of its two
/// terms. Vanishes for `h = (T')^{(1-k)/2}`.
pub fn leading_cancellation(map: &ConformalMapSpec, k: usize, z: Complex64) -> Result<f64> {
    let tj = map.jet(z, 2)?;
    let (d1, d2) = (tj.derivative_value(1), tj.derivative_value(2));
    let h = multiplier_jet(map, k, z, 1)?;
    let first = k as f64 * d1.powu(k as u32 - 1) * h.derivative_value(1);
    let bell = bell_polynomial_sum(k, k - 1, &[d1, d2])?;
    let second = bell * h.value();
    let scale = first.norm() + second.norm();
    Ok(if scale > 0.0 {
        (first + second).norm() / scale
    } else {
        0.0
    })
}

/// `g = (f∘T) (T')^{(1-k)/2}` on the disc.
pub struct Pushforward {
    f: Func,
    map: ConformalMapSpec,
    k: usize,
}

impl Pushforward {
    pub fn new(f: Func, map: ConformalMapSpec, k: usize) -> Result<Self> {
        map.validate()?;
        if k < 2 {
            return Err(Error::InvalidOde(format!("order {k} must be at least 2")));
        }
        Ok(Self { f, map, k })
    }

    pub fn shared(self) -> Func {
        Arc::new(self)
    }

    /// Values of `h` along a polyline, continuing the branch point by point
    /// with the power routine. Fails when neighbouring values differ by more
    /// than 10% or when the continued branch departs from the global one.
    pub fn multiplier_along(&self, path: &[Complex64]) -> Result<Vec<Complex64>> {
        let beta = Complex64::new(multiplier_exponent(self.k), 0.0);
        let mut out: Vec<Complex64> = Vec::with_capacity(path.len());
        for (idx, &z) in path.iter().enumerate() {
            let dt = self.map.jet(z, 2)?.derivative(1)?;
            let continued = match out.last() {
                None => dt.powc(beta, None)?.value(),
                Some(prev) => {
                    // pick the sheet closest to the previous value
                    let principal = dt.value().powc(beta);
                    let turn = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * beta.re);
                    let mut best = principal;
                    let mut cand = principal;
                    for _ in 0..8 {
                        cand *= turn;
                        if (cand - prev).norm() < (best - prev).norm() {
                            best = cand;
                        }
                    }
                    dt.powc(beta, Some(best))?.value()
                }
            };
            if let Some(prev) = out.last() {
                if (continued - prev).norm() > BRANCH_JUMP_TOL * prev.norm().max(continued.norm()) {
                    return Err(Error::BranchJump(z));
                }
            }
            let global = multiplier_jet(&self.map, self.k, z, 0)?.value();
            if (global - continued).norm() > 1e-8 * global.norm() {
                return Err(Error::BranchJump(path[idx]));
            }
            out.push(continued);
        }
        Ok(out)
    }
}

impl AnalyticFunction for Pushforward {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        let tj = self.map.jet(z, order)?;
        let outer = self.f.jet_at(tj.value(), order)?;
        let composed = ComplexJet::compose(&outer, &tj)?;
        let h = multiplier_jet(&self.map, self.k, z, order)?;
        Ok(&composed * &h)
    }

    fn domain(&self) -> Domain {
        Domain::Disc
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        let disc = 1.0 - z.norm();
        match (self.map.eval(z), self.map.derivative(z)) {
            (Ok(w), Ok(d)) => disc.min(self.f.radius_hint(w) / (4.0 * d.norm())),
            _ => 0.0,
        }
    }

    fn log_jet(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let tj = self.map.jet(z, 2)?;
        let (lf, df) = self.f.log_jet(tj.value())?;
        let beta = multiplier_exponent(self.k);
        let d1 = tj.derivative_value(1);
        let d2 = tj.derivative_value(2);
        let log_h = self.map.log_derivative(z)? * beta;
        Ok((lf + log_h, df * d1 + beta * d2 / d1))
    }
}

pub fn pushforward_solution(f: Func, map: &ConformalMapSpec, k: usize) -> Result<Func> {
    Ok(Pushforward::new(f, *map, k)?.shared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{Expr, ExprFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_coefficient_under_mobius_stays_zero() {
        let ode = LinearODE::from_exprs(
            2,
            vec![Expr::Constant { value: c(0.0, 0.0) }],
            Domain::RightHalfPlane,
        )
        .unwrap();
        let t = transform_ode(&ode, &ConformalMapSpec::cayley()).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.3), c(-0.7, 0.1)] {
            assert!(t.coeff(0).value_at(z).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn second_order_matches_schwarzian_formula() {
        let map = ConformalMapSpec::Sector {
            alpha: 1.5,
            phi: 0.3,
        };
        let ode = LinearODE::from_exprs(
            2,
            vec![Expr::Constant {
                value: c(0.7, -0.2),
            }],
            Domain::Plane,
        )
        .unwrap();
        let t = transform_ode(&ode, &map).unwrap();
        let a = ExprFunction::new(
            Expr::Constant {
                value: c(0.7, -0.2),
            },
            Domain::Plane,
        )
        .unwrap();
        for z in [c(0.1, 0.2), c(-0.5, 0.4), c(0.8, -0.1)] {
            let got = t.coeff(0).value_at(z).unwrap();
            let expect = second_order_coefficient(&a, &map, z).unwrap();
            assert!(
                (got - expect).norm() <= 1e-11 * expect.norm(),
                "{got} vs {expect}"
            );
        }
    }

    #[test]
    fn cancellation_of_next_to_leading_term() {
        let map = ConformalMapSpec::StolzPetal {
            alpha: 0.5,
            zeta: c(0.0, 1.0),
        };
        for k in 2..=6 {
            assert!(leading_cancellation(&map, k, c(0.3, -0.4)).unwrap() < 1e-14);
        }
    }

    #[test]
    fn multiplier_branch_is_continuous() {
        let map = ConformalMapSpec::Sector {
            alpha: 1.9,
            phi: 2.5,
        };
        let f: Func = ExprFunction::new(Expr::Constant { value: ONE }, Domain::Plane)
            .unwrap()
            .shared();
        let p = Pushforward::new(f, map, 4).unwrap();
        let path: Vec<Complex64> = (0..4000)
            .map(|i| Complex64::from_polar(0.9, i as f64 * 0.00158))
            .collect();
        assert_eq!(p.multiplier_along(&path).unwrap().len(), 4000);
        let coarse = [c(0.0, 0.0), c(0.95, 0.0)];
        assert!(matches!(
            p.multiplier_along(&coarse),
            Err(Error::BranchJump(_))
        ));
    }

    #[test]
    fn domain_mismatch_is_reported() {
        let ode =
            LinearODE::from_exprs(2, vec![Expr::Constant { value: ONE }], Domain::Disc).unwrap();
        assert!(matches!(
            transform_ode(&ode, &ConformalMapSpec::cayley()),
            Err(Error::DomainMismatch(_))
        ));
    }
}
