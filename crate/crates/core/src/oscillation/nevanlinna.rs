//! Circle means of `log |g|`: proximity functions and the Jensen check.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::AnalyticFunction;

pub const MIN_NODES: usize = 256;
const MAX_NODES: usize = 1 << 22;
const REFINE_TOL: f64 = 1e-4;

/// Trapezoid mean of `h(log|g|)` on `|z| = r`, doubling the nodes until
/// the relative change drops below `1e-4`.
fn circle_mean(
    g: &dyn AnalyticFunction,
    r: f64,
    nodes: usize,
    h: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius {r} must be positive")));
    }
    let sample =
        |theta: f64| -> Result<f64> { Ok(h(g.log_jet(Complex64::from_polar(r, theta))?.0.re)) };
    let mut n = nodes.max(MIN_NODES);
    let mut sum = 0.0;
    for i in 0..n {
        sum += sample(TAU * i as f64 / n as f64)?;
    }
    let mut mean = sum / n as f64;
    while n < MAX_NODES {
        for i in 0..n {
            sum += sample(TAU * (i as f64 + 0.5) / n as f64)?;
        }
        n *= 2;
        let next = sum / n as f64;
        if (next - mean).abs() <= REFINE_TOL * next.abs().max(1e-12) {
            return Ok(next);
        }
        mean = next;
    }
    Err(Error::Quadrature(mean, sum / n as f64))
}

/// `m(r, g) = (1/2π) ∫ log⁺|g(r e^{iθ})| dθ`.
pub fn proximity_m(g: &dyn AnalyticFunction, r: f64, nodes: usize) -> Result<f64> {
    circle_mean(g, r, nodes, &|l| l.max(0.0))
}

/// `m(r, 1/g)`, which equals the characteristic `T(r, 1/g)` for zero-free `g`.
pub fn proximity_m_reciprocal(g: &dyn AnalyticFunction, r: f64, nodes: usize) -> Result<f64> {
    circle_mean(g, r, nodes, &|l| (-l).max(0.0))
}

/// `(1/2π) ∫ log|g(r e^{iθ})| dθ - log|g(0)|`, which equals `N(r, 0, g)`
/// when `g(0) ≠ 0`.
pub fn jensen_mean(g: &dyn AnalyticFunction, r: f64, nodes: usize) -> Result<f64> {
    let at_origin = g.log_jet(Complex64::new(0.0, 0.0))?.0.re;
    Ok(circle_mean(g, r, nodes, &|l| l)? - at_origin)
}
