//! Analytic functions given by jet oracles.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::jet::ComplexJet;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A function that can produce its Taylor jet at any point of its domain.
pub trait AnalyticFunction: Send + Sync {
    /// Jet of order `order` centered at `z`.
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet>;

    fn domain(&self) -> Domain;

    /// A lower bound for the radius of convergence of the Taylor series at
    /// `z`, when one is known from the formula (`INFINITY` otherwise).
    fn radius_hint(&self, _z: Complex64) -> f64 {
        f64::INFINITY
    }

    fn value_at(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.jet_at(z, 0)?.value())
    }

    /// `(log g(z), g'(z)/g(z))` for some branch of the logarithm.
    ///
    /// Implementations whose values can overflow override this with a
    /// log-domain evaluation.
    fn log_jet(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let j = self.jet_at(z, 1)?;
        let v = j.value();
        if v == ZERO {
            return Err(Error::VanishingConstant(z));
        }
        Ok((v.ln(), j.coeff(1) / v))
    }
}

pub type Func = Arc<dyn AnalyticFunction>;

impl fmt::Debug for dyn AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticFunction on {:?}", self.domain())
    }
}

/// Built-in coefficient families, as they appear in JSON equation files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Expr {
    Constant {
        value: Complex64,
    },
    /// `Σ coeffs[m] w^m`.
    Polynomial {
        coeffs: Vec<Complex64>,
    },
    /// Quotient of two polynomials (coefficients in increasing degree).
    Rational {
        num: Vec<Complex64>,
        den: Vec<Complex64>,
    },
    /// `(1 - α²)/(4u²) - α² u^{2α-2}` with `u = w - shift`, principal power.
    Example51 {
        alpha: f64,
        #[serde(default)]
        shift: Complex64,
    },
}

impl Expr {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[Complex64]| v.iter().all(|c| c.is_finite());
        match self {
            Self::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidInput("constant value must be finite".into()))
            }
            Self::Polynomial { coeffs } if coeffs.is_empty() || !finite(coeffs) => Err(
                Error::InvalidInput("polynomial needs finite coefficients".into()),
            ),
            Self::Rational { num, den } => {
                if num.is_empty() || !finite(num) || !finite(den) || den.iter().all(|c| *c == ZERO)
                {
                    return Err(Error::InvalidInput(
                        "rational needs finite coefficients and a nonzero denominator".into(),
                    ));
                }
                Ok(())
            }
            Self::Example51 { alpha, shift }
                if !(alpha.is_finite() && *alpha > 0.0 && shift.is_finite()) =>
            {
                Err(Error::InvalidInput(format!(
                    "example51: alpha = {alpha} must be positive"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn into_function(self, domain: Domain) -> Result<Func> {
        Ok(Arc::new(ExprFunction::new(self, domain)?))
    }
}

fn poly_jet(coeffs: &[Complex64], z: Complex64, order: usize) -> ComplexJet {
    let v = ComplexJet::variable(z, order);
    let mut acc = ComplexJet::constant(z, ZERO, order);
    for c in coeffs.iter().rev() {
        acc = (&acc * &v).add_scalar(*c);
    }
    acc
}

/// Roots of a polynomial by the Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&ZERO) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(ZERO, |acc, a| acc * z + a);
    let bound = 1.0 + monic[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|i| seed.powu(i as u32) * bound * 0.5)
        .collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut denom = ONE;
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            if step.is_finite() {
                roots[i] -= step;
                delta = delta.max(step.norm());
            }
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    roots
}

/// A coefficient family bound to a domain.
#[derive(Clone, Debug)]
pub struct ExprFunction {
    expr: Expr,
    domain: Domain,
    poles: Vec<Complex64>,
}

impl ExprFunction {
    pub fn new(expr: Expr, domain: Domain) -> Result<Self> {
        expr.validate()?;
        let poles = match &expr {
            Expr::Rational { den, .. } => polynomial_roots(den),
            _ => Vec::new(),
        };
        Ok(Self {
            expr,
            domain,
            poles,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn shared(self) -> Func {
        Arc::new(self)
    }
}

impl AnalyticFunction for ExprFunction {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        match &self.expr {
            Expr::Constant { value } => Ok(ComplexJet::constant(z, *value, order)),
            Expr::Polynomial { coeffs } => Ok(poly_jet(coeffs, z, order)),
            Expr::Rational { num, den } => {
                poly_jet(num, z, order).checked_div(&poly_jet(den, z, order))
            }
            Expr::Example51 { alpha, shift } => {
                let u = ComplexJet::variable(z, order).add_scalar(-shift);
                let u0 = u.value();
                if u0 == ZERO || (u0.im == 0.0 && u0.re < 0.0) {
                    return Err(Error::OutsideDomain(z));
                }
                let inv_sq = u.powi(2).recip()?;
                let pow = u.powf(2.0 * alpha - 2.0)?;
                Ok(
                    &inv_sq.scale(Complex64::new((1.0 - alpha * alpha) / 4.0, 0.0))
                        - &pow.scale(Complex64::new(alpha * alpha, 0.0)),
                )
            }
        }
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        match &self.expr {
            Expr::Constant { .. } | Expr::Polynomial { .. } => f64::INFINITY,
            Expr::Rational { .. } => self
                .poles
                .iter()
                .map(|p| (z - p).norm())
                .fold(f64::INFINITY, f64::min),
            Expr::Example51 { shift, .. } => {
                let u = z - shift;
                if u.re > 0.0 {
                    u.norm()
                } else {
                    u.im.abs()
                }
            }
        }
    }
}

type JetClosure = dyn Fn(Complex64, usize) -> Result<ComplexJet> + Send + Sync;
type RadiusClosure = dyn Fn(Complex64) -> f64 + Send + Sync;

/// An analytic function given by a closure producing jets.
pub struct FnFunction {
    jet: Box<JetClosure>,
    radius: Option<Box<RadiusClosure>>,
    domain: Domain,
}

impl FnFunction {
    pub fn new(
        domain: Domain,
        jet: impl Fn(Complex64, usize) -> Result<ComplexJet> + Send + Sync + 'static,
    ) -> Self {
        Self {
            jet: Box::new(jet),
            radius: None,
            domain,
        }
    }

    pub fn with_radius(
        mut self,
        radius: impl Fn(Complex64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.radius = Some(Box::new(radius));
        self
    }

    pub fn shared(self) -> Func {
        Arc::new(self)
    }
}

impl AnalyticFunction for FnFunction {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        (self.jet)(z, order)
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.radius.as_ref().map_or(f64::INFINITY, |r| r(z))
    }
}

/// `log Σ exp(a_j)` together with the normalized weights `exp(a_j) / Σ`.
pub(crate) fn log_sum_exp(logs: &[Complex64]) -> (Complex64, Vec<Complex64>) {
    let m = logs.iter().map(|a| a.re).fold(f64::NEG_INFINITY, f64::max);
    let terms: Vec<Complex64> = logs.iter().map(|a| (a - m).exp()).collect();
    let s: Complex64 = terms.iter().sum();
    (s.ln() + m, terms.into_iter().map(|t| t / s).collect())
}

/// `exp(L(z)) Σ_j C_j exp(r_j Ψ(z))` with analytic `L`, `Ψ`.
///
/// Values of such sums overflow quickly near the boundary of the disc, so
/// [`AnalyticFunction::log_jet`] is evaluated in the log domain.
pub struct ExponentialSum {
    log_prefactor: Func,
    phase: Func,
    terms: Vec<(Complex64, Complex64)>,
}

impl ExponentialSum {
    /// `terms` holds `(C_j, r_j)` pairs; every `C_j` must be nonzero.
    pub fn new(
        log_prefactor: Func,
        phase: Func,
        terms: Vec<(Complex64, Complex64)>,
    ) -> Result<Self> {
        if terms.is_empty()
            || terms
                .iter()
                .any(|(c, r)| *c == ZERO || !c.is_finite() || !r.is_finite())
        {
            return Err(Error::InvalidInput(
                "exponential sum needs nonzero finite terms".into(),
            ));
        }
        Ok(Self {
            log_prefactor,
            phase,
            terms,
        })
    }

    pub fn terms(&self) -> &[(Complex64, Complex64)] {
        &self.terms
    }
}

impl AnalyticFunction for ExponentialSum {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        let l = self.log_prefactor.jet_at(z, order)?;
        let psi = self.phase.jet_at(z, order)?;
        let mut acc = ComplexJet::constant(z, ZERO, order);
        for (c, r) in &self.terms {
            acc = &acc + &psi.scale(*r).add_scalar(c.ln()).exp();
        }
        let out = &acc * &l.exp();
        if !out.is_finite() {
            return Err(Error::Breakdown(format!(
                "exponential sum overflows at {z}"
            )));
        }
        Ok(out)
    }

    fn domain(&self) -> Domain {
        self.phase.domain()
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.phase
            .radius_hint(z)
            .min(self.log_prefactor.radius_hint(z))
    }

    fn log_jet(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let l = self.log_prefactor.jet_at(z, 1)?;
        let psi = self.phase.jet_at(z, 1)?;
        let logs: Vec<Complex64> = self
            .terms
            .iter()
            .map(|(c, r)| c.ln() + r * psi.value())
            .collect();
        let (lse, weights) = log_sum_exp(&logs);
        let rate: Complex64 = weights
            .iter()
            .zip(&self.terms)
            .map(|(w, (_, r))| w * r)
            .sum();
        let log_g = l.value() + lse;
        let dlog = l.coeff(1) + rate * psi.coeff(1);
        if !log_g.re.is_finite() || !dlog.is_finite() {
            return Err(Error::VanishingConstant(z));
        }
        Ok((log_g, dlog))
    }
}

/// `Σ c_i f_i`.
pub struct LinearCombination {
    parts: Vec<(Complex64, Func)>,
}

impl LinearCombination {
    pub fn new(parts: Vec<(Complex64, Func)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("empty linear combination".into()));
        }
        Ok(Self { parts })
    }
}

impl AnalyticFunction for LinearCombination {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        let mut acc = ComplexJet::constant(z, ZERO, order);
        for (c, f) in &self.parts {
            acc = &acc + &f.jet_at(z, order)?.scale(*c);
        }
        Ok(acc)
    }

    fn domain(&self) -> Domain {
        self.parts[0].1.domain()
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.parts
            .iter()
            .map(|(_, f)| f.radius_hint(z))
            .fold(f64::INFINITY, f64::min)
    }

    fn log_jet(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let mut logs = Vec::with_capacity(self.parts.len());
        let mut dlogs = Vec::with_capacity(self.parts.len());
        let mut vanished = ZERO;
        for (c, f) in &self.parts {
            if *c == ZERO {
                continue;
            }
            match f.log_jet(z) {
                Ok((lf, df)) => {
                    logs.push(c.ln() + lf);
                    dlogs.push(df);
                }
                // a part vanishing at z only adds its derivative
                Err(Error::VanishingConstant(_)) => vanished += c * f.jet_at(z, 1)?.coeff(1),
                Err(e) => return Err(e),
            }
        }
        if logs.is_empty() {
            return Err(Error::VanishingConstant(z));
        }
        let (lse, weights) = log_sum_exp(&logs);
        let dlog: Complex64 = weights
            .iter()
            .zip(&dlogs)
            .map(|(w, d)| w * d)
            .sum::<Complex64>()
            + vanished * (-lse).exp();
        if !lse.re.is_finite() || !dlog.is_finite() {
            return Err(Error::VanishingConstant(z));
        }
        Ok((lse, dlog))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_jet() {
        let f = ExprFunction::new(
            Expr::Polynomial {
                coeffs: vec![c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)],
            },
            Domain::Plane,
        )
        .unwrap();
        let j = f.jet_at(c(1.0, 0.0), 3).unwrap();
        assert_eq!(j.coeffs(), &[c(4.0, 0.0), c(6.0, 0.0), c(3.0, 0.0), ZERO]);
    }

    #[test]
    fn rational_radius_from_poles() {
        let f = ExprFunction::new(
            Expr::Rational {
                num: vec![ONE],
                den: vec![c(4.0, 0.0), ZERO, ONE],
            },
            Domain::Plane,
        )
        .unwrap();
        assert!((f.radius_hint(ZERO) - 2.0).abs() < 1e-12);
        let v = f.value_at(c(1.0, 0.0)).unwrap();
        assert!((v - c(0.2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn durand_kerner_cubic() {
        // (w - 1)(w + 2)(w - 3i)
        let roots = polynomial_roots(&[c(0.0, 6.0), c(-2.0, -3.0), c(1.0, -3.0), ONE]);
        for expect in [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)] {
            assert!(
                roots.iter().any(|r| (r - expect).norm() < 1e-10),
                "{roots:?}"
            );
        }
    }

    #[test]
    fn example51_value() {
        let f = ExprFunction::new(
            Expr::Example51 {
                alpha: 1.5,
                shift: ZERO,
            },
            Domain::RightHalfPlane,
        )
        .unwrap();
        let w = c(2.0, 1.0);
        let expect = (1.0 - 2.25) / (4.0 * w * w) - 2.25 * w.powf(1.0);
        assert!((f.value_at(w).unwrap() - expect).norm() < 1e-14);
        assert!(f.value_at(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn expr_json() {
        let e: Expr = serde_json::from_str(r#"{"family":"example51","alpha":1.5}"#).unwrap();
        assert_eq!(
            e,
            Expr::Example51 {
                alpha: 1.5,
                shift: ZERO
            }
        );
        let e: Expr = serde_json::from_str(r#"{"family":"constant","value":[2.0,0.0]}"#).unwrap();
        assert_eq!(e, Expr::Constant { value: c(2.0, 0.0) });
    }

    #[test]
    fn exponential_sum_log_domain_matches_direct() {
        let zero: Func = ExprFunction::new(Expr::Constant { value: ZERO }, Domain::Plane)
            .unwrap()
            .shared();
        let id: Func = ExprFunction::new(
            Expr::Polynomial {
                coeffs: vec![ZERO, ONE],
            },
            Domain::Plane,
        )
        .unwrap()
        .shared();
        let g =
            ExponentialSum::new(zero, id, vec![(ONE, c(0.0, 1.0)), (ONE, c(0.0, -1.0))]).unwrap();
        let z = c(0.3, 0.2);
        let (lg, dl) = g.log_jet(z).unwrap();
        let cos2 = 2.0 * z.cos();
        assert!((lg.exp() - cos2).norm() < 1e-14);
        assert!((dl - (-z.tan())).norm() < 1e-13);
        // far out the direct jet overflows but the log form does not
        let far = c(0.0, 800.0);
        assert!(g.jet_at(far, 1).is_err());
        assert!((g.log_jet(far).unwrap().0.re - 800.0).abs() < 1e-9);
    }

    #[test]
    fn linear_combination_log_jet() {
        let a: Func = ExprFunction::new(
            Expr::Polynomial {
                coeffs: vec![ONE, ONE],
            },
            Domain::Plane,
        )
        .unwrap()
        .shared();
        let b: Func = ExprFunction::new(
            Expr::Polynomial {
                coeffs: vec![ZERO, ZERO, ONE],
            },
            Domain::Plane,
        )
        .unwrap()
        .shared();
        let s = LinearCombination::new(vec![(ONE, a), (c(2.0, 0.0), b)]).unwrap();
        let z = c(0.5, -0.5);
        let v = ONE + z + 2.0 * z * z;
        let (lg, dl) = s.log_jet(z).unwrap();
        assert!((lg.exp() - v).norm() < 1e-14);
        assert!((dl - (ONE + 4.0 * z) / v).norm() < 1e-14);
    }

    #[test]
    fn combination_with_a_part_vanishing_at_the_point() {
        let f = ExprFunction::new(
            Expr::Polynomial {
                coeffs: vec![c(0.0, 0.0), ONE],
            },
            Domain::Plane,
        )
        .unwrap()
        .shared();
        let g = ExprFunction::new(
            Expr::Polynomial {
                coeffs: vec![c(2.0, 0.0), c(0.0, 1.0)],
            },
            Domain::Plane,
        )
        .unwrap()
        .shared();
        let s = LinearCombination::new(vec![(c(3.0, 0.0), f), (ONE, g)]).unwrap();
        let (lg, dl) = s.log_jet(c(0.0, 0.0)).unwrap();
        assert!((lg.exp() - c(2.0, 0.0)).norm() < 1e-14);
        assert!((dl - c(3.0, 1.0) / 2.0).norm() < 1e-14);
    }
}
