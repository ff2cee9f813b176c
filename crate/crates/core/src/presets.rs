//! Closed-form test equations: zero-free solutions with a sector-type
//! coefficient, and exponential sums pushed to the disc.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::conformal::ConformalMapSpec;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::function::{log_sum_exp, AnalyticFunction, ExponentialSum, Expr, FnFunction, Func};
use crate::jet::ComplexJet;
use crate::ode::LinearODE;
use crate::oscillation::{
    theorem2_report_with_sums, CoefficientContext, OscillationReport, RadialGrid,
};
use crate::transform::multiplier_exponent;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidInput(format!(
            "alpha = {alpha} must lie in (0, 2)"
        )));
    }
    Ok(())
}

/// `f'' + a f = 0` on the right half-plane with
/// `a(w) = (1-α²)/(4w²) - α² w^{2α-2}`; solutions `w^{(1-α)/2} exp(±w^α)`.
pub fn sector_power_ode(alpha: f64) -> Result<LinearODE> {
    check_alpha(alpha)?;
    LinearODE::from_exprs(
        2,
        vec![Expr::Example51 { alpha, shift: ZERO }],
        Domain::RightHalfPlane,
    )
}

/// `w^{(1-α)/2} exp(sign · w^α)` on the right half-plane.
pub fn sector_power_solution(alpha: f64, sign: f64) -> Func {
    FnFunction::new(Domain::RightHalfPlane, move |w, order| {
        let v = ComplexJet::variable(w, order);
        let pre = v.powf((1.0 - alpha) / 2.0)?;
        let e = v.powf(alpha)?.scale(Complex64::new(sign, 0.0)).exp();
        Ok(&pre * &e)
    })
    .with_radius(|w| w.norm())
    .shared()
}

/// The disc coefficient `(1-α²)/(1-z²)² - 4α² (1+z)^{2α-2} / (1-z)^{2α+2}`
/// of the equation solved by [`sector_power_disc_solution`].
///
/// The factor 4 comes from `T'(z)² = 4/(1-z)^4`; the variant without it is
/// [`sector_power_disc_coefficient_unscaled`].
pub fn sector_power_disc_coefficient(alpha: f64, z: Complex64) -> Complex64 {
    let one_m = ONE - z;
    let one_p = ONE + z;
    (1.0 - alpha * alpha) / (ONE - z * z).powu(2)
        - 4.0 * alpha * alpha * one_p.powf(2.0 * alpha - 2.0) / one_m.powf(2.0 * alpha + 2.0)
}

/// `(1-α²)/(1-z²)² - α² (1+z)^{2α-2} / (1-z)^{2α+2}`, the same expression
/// with the second term a quarter of its value.
pub fn sector_power_disc_coefficient_unscaled(alpha: f64, z: Complex64) -> Complex64 {
    let one_m = ONE - z;
    let one_p = ONE + z;
    (1.0 - alpha * alpha) / (ONE - z * z).powu(2)
        - alpha * alpha * one_p.powf(2.0 * alpha - 2.0) / one_m.powf(2.0 * alpha + 2.0)
}

/// [`sector_power_disc_coefficient`] as an analytic function on the disc.
pub fn sector_power_disc_function(alpha: f64) -> Func {
    FnFunction::new(Domain::Disc, move |z, order| {
        let v = ComplexJet::variable(z, order);
        let one = ComplexJet::constant(z, ONE, order);
        let one_m = &one - &v;
        let one_p = &one + &v;
        let first = (&one_m * &one_p)
            .powi(2)
            .recip()?
            .scale(Complex64::new(1.0 - alpha * alpha, 0.0));
        let second = one_p
            .powf(2.0 * alpha - 2.0)?
            .checked_div(&one_m.powf(2.0 * alpha + 2.0)?)?;
        Ok(&first - &second.scale(Complex64::new(4.0 * alpha * alpha, 0.0)))
    })
    .with_radius(|z| (ONE - z).norm().min((ONE + z).norm()))
    .shared()
}

/// `((1+z)/(1-z))^α` on the disc.
pub fn cayley_power(alpha: f64) -> Func {
    FnFunction::new(Domain::Disc, move |z, order| {
        let v = ComplexJet::variable(z, order);
        let one = ComplexJet::constant(z, ONE, order);
        (&one + &v).checked_div(&(&one - &v))?.powf(alpha)
    })
    .with_radius(|z| (ONE - z).norm().min((ONE + z).norm()))
    .shared()
}

/// `log(2^{-1/2} (1-z)^{(1+α)/2} (1+z)^{(1-α)/2})`, principal logs.
fn sector_power_log_prefactor(alpha: f64) -> Func {
    FnFunction::new(Domain::Disc, move |z, order| {
        let v = ComplexJet::variable(z, order);
        let one = ComplexJet::constant(z, ONE, order);
        let lm = (&one - &v)
            .ln()?
            .scale(Complex64::new((1.0 + alpha) / 2.0, 0.0));
        let lp = (&one + &v)
            .ln()?
            .scale(Complex64::new((1.0 - alpha) / 2.0, 0.0));
        Ok((&lm + &lp).add_scalar(Complex64::new(-0.5 * 2f64.ln(), 0.0)))
    })
    .with_radius(|z| (ONE - z).norm().min((ONE + z).norm()))
    .shared()
}

/// `Σ C_j g_j` with `g_j = 2^{-1/2}(1-z)^{(1+α)/2}(1+z)^{(1-α)/2} exp((-1)^{j+1} ((1+z)/(1-z))^α)`.
pub struct SectorPowerSum {
    alpha: f64,
    terms: Vec<(Complex64, f64)>,
    series: ExponentialSum,
}

impl AnalyticFunction for SectorPowerSum {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        self.series.jet_at(z, order)
    }

    fn domain(&self) -> Domain {
        Domain::Disc
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        self.series.radius_hint(z)
    }

    fn log_jet(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDisc(z));
        }
        let a = self.alpha;
        let (one_m, one_p) = (ONE - z, ONE + z);
        let (lm, lp) = (one_m.ln(), one_p.ln());
        let log_pre = 0.5 * (1.0 + a) * lm + 0.5 * (1.0 - a) * lp - 0.5 * 2f64.ln();
        let dlog_pre = -0.5 * (1.0 + a) / one_m + 0.5 * (1.0 - a) / one_p;
        let psi = (a * (lp - lm)).exp();
        let dpsi = psi * (2.0 * a) / (one_m * one_p);
        let logs: Vec<Complex64> = self
            .terms
            .iter()
            .map(|(c, sign)| c.ln() + sign * psi)
            .collect();
        let (lse, weights) = log_sum_exp(&logs);
        let mixed: Complex64 = weights
            .iter()
            .zip(&self.terms)
            .map(|(w, (_, sign))| w * sign)
            .sum();
        let (log_g, dlog) = (log_pre + lse, dlog_pre + mixed * dpsi);
        if !log_g.re.is_finite() || !dlog.is_finite() {
            return Err(Error::VanishingConstant(z));
        }
        Ok((log_g, dlog))
    }
}

/// The closed-form solutions of the transformed sector equation on the disc
/// (coefficients `c1`, `c2` of the two exponentials).
pub fn sector_power_disc_solution(
    alpha: f64,
    c1: Complex64,
    c2: Complex64,
) -> Result<SectorPowerSum> {
    check_alpha(alpha)?;
    let mut terms = Vec::new();
    if c1 != ZERO {
        terms.push((c1, 1.0));
    }
    if c2 != ZERO {
        terms.push((c2, -1.0));
    }
    let series = ExponentialSum::new(
        sector_power_log_prefactor(alpha),
        cayley_power(alpha),
        terms
            .iter()
            .map(|&(c, sign)| (c, Complex64::new(sign, 0.0)))
            .collect(),
    )?;
    Ok(SectorPowerSum {
        alpha,
        terms,
        series,
    })
}

/// Zeros of `g_1 + g_2`: `z_n = (u_n - 1)/(u_n + 1)` with `u_n^α = (2n+1)πi/2`.
/// Returns the moduli `|z_n| < rmax`, sorted.
pub fn sector_power_zero_moduli(alpha: f64, rmax: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        let mut n: i64 = if sign > 0 { 0 } else { -1 };
        loop {
            let w = Complex64::new(0.0, (2 * n + 1) as f64 * PI / 2.0);
            let u = w.powf(1.0 / alpha);
            let z = (u - ONE) / (u + ONE);
            let r = z.norm();
            if r >= rmax {
                break;
            }
            out.push(r);
            n += sign;
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Coefficients `a_0..a_{k-2}` of `Π (r - r_j) = r^k + a_{k-2} r^{k-2} + ... + a_0`.
/// The roots must sum to zero.
pub fn characteristic_coefficients(roots: &[Complex64]) -> Result<Vec<Complex64>> {
    let k = roots.len();
    if k < 2 {
        return Err(Error::InvalidInput("at least two roots are needed".into()));
    }
    let sum: Complex64 = roots.iter().sum();
    let size = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if sum.norm() > 1e-12 * size.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "roots must sum to zero (sum = {sum})"
        )));
    }
    // poly[m] = coefficient of r^m
    let mut poly = vec![ONE];
    for r in roots {
        let mut next = vec![ZERO; poly.len() + 1];
        for (m, c) in poly.iter().enumerate() {
            next[m + 1] += c;
            next[m] -= c * r;
        }
        poly = next;
    }
    Ok(poly[..k - 1].to_vec())
}

/// Constant-coefficient equation on the plane whose characteristic roots are `roots`.
pub fn exponential_ode(roots: &[Complex64]) -> Result<LinearODE> {
    let coeffs = characteristic_coefficients(roots)?;
    LinearODE::from_exprs(
        roots.len(),
        coeffs
            .into_iter()
            .map(|value| Expr::Constant { value })
            .collect(),
        Domain::Plane,
    )
}

/// `e^{r w}` on the plane.
pub fn exponential(rate: Complex64) -> Func {
    FnFunction::new(Domain::Plane, move |w, order| {
        Ok(ComplexJet::variable(w, order).scale(rate).exp())
    })
    .shared()
}

/// `Σ C_j e^{r_j T(z)} (T'(z))^{(1-k)/2}` on the disc.
pub struct PushedExponentialSum {
    map: ConformalMapSpec,
    beta: f64,
    terms: Vec<(Complex64, Complex64)>,
    series: ExponentialSum,
}

impl PushedExponentialSum {
    pub fn terms(&self) -> &[(Complex64, Complex64)] {
        &self.terms
    }
}

impl AnalyticFunction for PushedExponentialSum {
    fn jet_at(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        self.series.jet_at(z, order)
    }

    fn domain(&self) -> Domain {
        Domain::Disc
    }

    fn radius_hint(&self, z: Complex64) -> f64 {
        1.0 - z.norm()
    }

    fn log_jet(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let w = self.map.eval(z)?;
        let log_dt = self.map.log_derivative(z)?;
        let slope = self.map.log_derivative_slope(z)?;
        let dt = log_dt.exp();
        let logs: Vec<Complex64> = self.terms.iter().map(|(c, r)| c.ln() + r * w).collect();
        let (lse, weights) = log_sum_exp(&logs);
        let rate: Complex64 = weights
            .iter()
            .zip(&self.terms)
            .map(|(wt, (_, r))| wt * r)
            .sum();
        let log_g = self.beta * log_dt + lse;
        let dlog = self.beta * slope + rate * dt;
        if !log_g.re.is_finite() || !dlog.is_finite() {
            return Err(Error::VanishingConstant(z));
        }
        Ok((log_g, dlog))
    }
}

/// `Σ C_j e^{r_j T(z)} (T'(z))^{(1-k)/2}`, the pushforward of an exponential
/// sum, evaluated in the log domain.
pub fn pushed_exponential_sum(
    map: ConformalMapSpec,
    k: usize,
    terms: Vec<(Complex64, Complex64)>,
) -> Result<PushedExponentialSum> {
    map.validate()?;
    let beta = multiplier_exponent(k);
    let log_h = FnFunction::new(Domain::Disc, move |z, order| {
        let dt = map.jet(z, order + 1)?.derivative(1)?;
        Ok(dt
            .ln_with_constant(map.log_derivative(z)?)
            .scale(Complex64::new(beta, 0.0)))
    })
    .with_radius(|z| 1.0 - z.norm())
    .shared();
    let phase = FnFunction::new(Domain::Disc, move |z, order| map.jet(z, order))
        .with_radius(|z| 1.0 - z.norm())
        .shared();
    let series = ExponentialSum::new(log_h, phase, terms.clone())?;
    Ok(PushedExponentialSum {
        map,
        beta,
        terms,
        series,
    })
}

/// `exp(-((1+z)/(1-z))^α)`, an inner-type function for `α = 1`.
pub fn singular_inner(alpha: f64) -> Result<ExponentialSum> {
    check_alpha(alpha)?;
    let zero = FnFunction::new(Domain::Disc, |z, order| {
        Ok(ComplexJet::constant(z, ZERO, order))
    })
    .shared();
    ExponentialSum::new(zero, cayley_power(alpha), vec![(ONE, -ONE)])
}

/// A base on the disc, the sums `f_j + f_k` in closed form and the
/// coefficients they belong to.
pub struct OscillationProblem {
    pub base: Vec<Func>,
    pub sums: Vec<Func>,
    pub coefficients: CoefficientContext,
}

impl OscillationProblem {
    pub fn report(&self, grid: &RadialGrid) -> Result<OscillationReport> {
        theorem2_report_with_sums(&self.base, &self.sums, &self.coefficients, grid)
    }
}

/// `f'' + a f = 0` with the sector-power coefficient, pulled back by the
/// Cayley map; base `g_1, g_2`, sum `g_1 + g_2`.
pub fn sector_power_problem(alpha: f64) -> Result<OscillationProblem> {
    let base: Vec<Func> = vec![
        Arc::new(sector_power_disc_solution(alpha, ONE, ZERO)?),
        Arc::new(sector_power_disc_solution(alpha, ZERO, ONE)?),
    ];
    let sums: Vec<Func> = vec![Arc::new(sector_power_disc_solution(alpha, ONE, ONE)?)];
    let coefficients = CoefficientContext::Pullback {
        ode: sector_power_ode(alpha)?,
        map: ConformalMapSpec::cayley(),
    };
    Ok(OscillationProblem {
        base,
        sums,
        coefficients,
    })
}

/// The constant-coefficient equation with characteristic roots `roots`,
/// pulled back by `map`; base `e^{r_j T} (T')^{(1-k)/2}`.
pub fn exponential_sum_problem(
    map: ConformalMapSpec,
    roots: &[Complex64],
) -> Result<OscillationProblem> {
    let k = roots.len();
    let ode = exponential_ode(roots)?;
    let base = roots
        .iter()
        .map(|&r| Ok(Arc::new(pushed_exponential_sum(map, k, vec![(ONE, r)])?) as Func))
        .collect::<Result<Vec<_>>>()?;
    let sums = roots[..k - 1]
        .iter()
        .map(|&r| {
            Ok(Arc::new(pushed_exponential_sum(
                map,
                k,
                vec![(ONE, r), (ONE, roots[k - 1])],
            )?) as Func)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OscillationProblem {
        base,
        sums,
        coefficients: CoefficientContext::Pullback { ode, map },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn characteristic_polynomial() {
        let a = characteristic_coefficients(&[c(1.0, 0.0), c(2.0, 0.0), c(-3.0, 0.0)]).unwrap();
        assert!((a[0] - c(6.0, 0.0)).norm() < 1e-14 && (a[1] - c(-7.0, 0.0)).norm() < 1e-14);
        assert!(characteristic_coefficients(&[c(1.0, 0.0), c(2.0, 0.0)]).is_err());
    }

    #[test]
    fn disc_solution_matches_pushforward_formula() {
        let alpha = 1.5;
        let g = sector_power_disc_solution(alpha, ONE, ZERO).unwrap();
        let f = sector_power_solution(alpha, 1.0);
        let z = c(0.3, -0.4);
        let t = ConformalMapSpec::cayley();
        let expect = f.value_at(t.eval(z).unwrap()).unwrap() * t.derivative(z).unwrap().powf(-0.5);
        assert!((g.value_at(z).unwrap() - expect).norm() < 1e-13 * expect.norm());
    }

    #[test]
    fn closed_log_derivative_matches_series() {
        let g = sector_power_disc_solution(1.25, ONE, c(0.5, -2.0)).unwrap();
        for z in [c(0.1, 0.2), c(0.8, -0.1), c(-0.6, 0.5)] {
            let (l, d) = g.log_jet(z).unwrap();
            let (l2, d2) = g.series.log_jet(z).unwrap();
            assert!(((l - l2).exp() - ONE).norm() < 1e-12);
            assert!((d - d2).norm() < 1e-11 * d.norm());
        }
    }

    #[test]
    fn disc_solution_solves_disc_equation() {
        let g = sector_power_disc_solution(1.5, ONE, c(0.3, 0.1)).unwrap();
        let z = c(0.3, -0.2);
        let j = g.jet_at(z, 2).unwrap();
        let b = sector_power_disc_coefficient(1.5, z);
        assert!((j.derivative_value(2) + b * j.value()).norm() < 1e-12 * (b * j.value()).norm());
        let unscaled = sector_power_disc_coefficient_unscaled(1.5, z);
        assert!(
            (j.derivative_value(2) + unscaled * j.value()).norm() > 0.1 * (b * j.value()).norm()
        );
    }

    #[test]
    fn pushed_sum_log_derivative_matches_series() {
        for map in [
            ConformalMapSpec::Sector {
                alpha: 1.5,
                phi: 0.2,
            },
            ConformalMapSpec::StolzPetal {
                alpha: 0.5,
                zeta: ONE,
            },
            ConformalMapSpec::Strip {
                alpha: 1.0,
                phi: 0.0,
            },
        ] {
            let g = pushed_exponential_sum(
                map,
                3,
                vec![(ONE, c(2.0, 0.0)), (c(0.5, 1.0), c(-1.0, 0.3))],
            )
            .unwrap();
            for z in [c(0.1, 0.2), c(0.6, -0.1), c(-0.4, 0.5)] {
                let (l, d) = g.log_jet(z).unwrap();
                let (l2, d2) = g.series.log_jet(z).unwrap();
                assert!(((l - l2).exp() - ONE).norm() < 1e-12, "{map:?} {z}");
                assert!((d - d2).norm() < 1e-11 * d.norm(), "{map:?} {z}");
            }
        }
    }

    #[test]
    fn lattice_points_are_zeros() {
        let alpha = 1.5;
        let g = sector_power_disc_solution(alpha, ONE, ONE).unwrap();
        let w = Complex64::new(0.0, 3.0 * PI / 2.0);
        let u = w.powf(1.0 / alpha);
        let z = (u - ONE) / (u + ONE);
        assert!(g.value_at(z).unwrap().norm() < 1e-12);
        assert!(sector_power_zero_moduli(alpha, 0.5).is_empty());
        assert!(!sector_power_zero_moduli(alpha, 0.6).is_empty());
    }
}
