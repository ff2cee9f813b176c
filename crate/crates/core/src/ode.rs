//! Normalized linear equations `f^(k) + a_{k-2} f^(k-2) + ... + a_1 f' + a_0 f = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, Expr, ExprFunction, Func};
use crate::jet::ComplexJet;

/// Largest supported equation order.
pub const MAX_ORDER: usize = 8;

#[derive(Clone)]
pub struct LinearODE {
    order: usize,
    coeffs: Vec<Func>,
    domain: Domain,
    exprs: Option<Vec<Expr>>,
}

impl std::fmt::Debug for LinearODE {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearODE")
            .field("order", &self.order)
            .field("domain", &self.domain)
            .field("exprs", &self.exprs)
            .finish()
    }
}

impl LinearODE {
    /// `coeffs` holds `a_0, ..., a_{k-2}`.
    pub fn new(order: usize, coeffs: Vec<Func>, domain: Domain) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(Error::InvalidOde(format!(
                "order {order} outside 2..={MAX_ORDER}"
            )));
        }
        if coeffs.len() != order - 1 {
            return Err(Error::InvalidOde(format!(
                "order {order} needs {} coefficients a_0..a_{}, got {}",
                order - 1,
                order - 2,
                coeffs.len()
            )));
        }
        if let Some(j) = coeffs.iter().position(|c| c.domain() != domain) {
            return Err(Error::InvalidOde(format!(
                "coefficient a_{j} lives on a different domain than the equation"
            )));
        }
        Ok(Self {
            order,
            coeffs,
            domain,
            exprs: None,
        })
    }

    pub fn from_exprs(order: usize, exprs: Vec<Expr>, domain: Domain) -> Result<Self> {
        let coeffs = exprs
            .iter()
            .map(|e| Ok(ExprFunction::new(e.clone(), domain)?.shared()))
            .collect::<Result<Vec<_>>>()?;
        let mut ode = Self::new(order, coeffs, domain)?;
        ode.exprs = Some(exprs);
        Ok(ode)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeffs(&self) -> &[Func] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &Func {
        &self.coeffs[j]
    }

    /// The coefficient families this equation was built from, if any.
    pub fn exprs(&self) -> Option<&[Expr]> {
        self.exprs.as_deref()
    }

    /// Jets of `a_0, ..., a_{k-2}` at `z`.
    pub fn coefficient_jets(&self, z: Complex64, order: usize) -> Result<Vec<ComplexJet>> {
        self.coeffs.iter().map(|c| c.jet_at(z, order)).collect()
    }

    pub fn coefficient_values(&self, z: Complex64) -> Result<Vec<Complex64>> {
        self.coeffs.iter().map(|c| c.value_at(z)).collect()
    }

    /// Smallest radius hint of the coefficients at `z`.
    pub fn radius_hint(&self, z: Complex64) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.radius_hint(z))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_spec(&self) -> Option<OdeSpec> {
        self.exprs.as_ref().map(|e| OdeSpec {
            order: self.order,
            coeffs: e.clone(),
            domain: self.domain,
        })
    }
}

/// JSON form of an equation: `{"order": k, "coeffs": [...], "domain": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSpec {
    pub order: usize,
    pub coeffs: Vec<Expr>,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

fn default_domain() -> Domain {
    Domain::Disc
}

impl OdeSpec {
    pub fn build(&self) -> Result<LinearODE> {
        LinearODE::from_exprs(self.order, self.coeffs.clone(), self.domain)
    }
}

/// Relative residual `(g^(k) + Σ b_j g^(j)) / (max_j |b_j g^(j)| + |g^(k)|)` at `z`.
///
/// The unnormalized value is returned when every term vanishes.
pub fn residual(ode: &LinearODE, g: &dyn AnalyticFunction, z: Complex64) -> Result<Complex64> {
    let k = ode.order();
    let jet = g.jet_at(z, k)?;
    let derivs = jet.derivative_values();
    let coeffs = ode.coefficient_values(z)?;
    let mut sum = derivs[k];
    let mut biggest = 0.0f64;
    for (j, b) in coeffs.iter().enumerate() {
        let term = b * derivs[j];
        biggest = biggest.max(term.norm());
        sum += term;
    }
    let scale = biggest + derivs[k].norm();
    Ok(if scale > 0.0 { sum / scale } else { sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FnFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cos_fn() -> FnFunction {
        FnFunction::new(Domain::Plane, |z, order| {
            let e = ComplexJet::variable(z, order).scale(c(0.0, 1.0)).exp();
            let f = ComplexJet::variable(z, order).scale(c(0.0, -1.0)).exp();
            Ok((&e + &f).scale(c(0.5, 0.0)))
        })
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"order": 2, "coeffs": [{"family": "constant", "value": [1.0, 0.0]}], "domain": "plane"}"#;
        let spec: OdeSpec = serde_json::from_str(text).unwrap();
        let ode = spec.build().unwrap();
        assert_eq!(ode.order(), 2);
        assert_eq!(ode.to_spec().unwrap(), spec);
    }

    #[test]
    fn wrong_coefficient_count_rejected() {
        let e = Expr::Constant { value: c(1.0, 0.0) };
        assert!(matches!(
            LinearODE::from_exprs(3, vec![e.clone()], Domain::Plane),
            Err(Error::InvalidOde(_))
        ));
        assert!(matches!(
            LinearODE::from_exprs(1, vec![], Domain::Plane),
            Err(Error::InvalidOde(_))
        ));
    }

    #[test]
    fn residual_of_exact_and_perturbed_solution() {
        let ode = LinearODE::from_exprs(
            2,
            vec![Expr::Constant { value: c(1.0, 0.0) }],
            Domain::Plane,
        )
        .unwrap();
        let g = cos_fn();
        assert!(residual(&ode, &g, c(0.3, -0.2)).unwrap().norm() < 1e-15);
        let bumped = FnFunction::new(Domain::Plane, |z, order| {
            let base = cos_fn().jet_at(z, order)?;
            let v = ComplexJet::variable(z, order);
            Ok(&base + &(&v * &v).scale(c(0.5, 0.0)))
        });
        // at 0: g'' = -1 + 1 = 0, b g = 1 -> residual 1
        assert!((residual(&ode, &bumped, c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }
}
