//! Gauss–Legendre panels and the coefficient-growth integrals over discs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::conformal::ConformalMapSpec;
use crate::error::{Error, Result};
use crate::ode::LinearODE;

/// Nodes and weights of the 8-point Gauss–Legendre rule on `[-1, 1]`.
pub(crate) const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

fn gl8(f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in GL8 {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

struct Piece {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Piece {
    fn new(f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, whole: f64) -> Result<Self> {
        let m = 0.5 * (a + b);
        let left = gl8(f, a, m)?;
        let right = gl8(f, m, b)?;
        Ok(Self {
            a,
            b,
            left,
            right,
            error: (whole - left - right).abs(),
        })
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Legendre quadrature of a real integrand over
/// `[a, b]`, started from `initial` equal pieces. Stops when the summed
/// error estimate is below `rel_tol` times the integral (or `abs_tol`).
pub fn adaptive_integral(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    initial: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    const MAX_PIECES: usize = 4000;
    let n = initial.max(1);
    let mut heap = BinaryHeap::with_capacity(4 * n);
    for i in 0..n {
        let lo = a + (b - a) * i as f64 / n as f64;
        let hi = a + (b - a) * (i + 1) as f64 / n as f64;
        let whole = gl8(f, lo, hi)?;
        heap.push(Piece::new(f, lo, hi, whole)?);
    }
    let mut previous = f64::NAN;
    loop {
        let total: f64 = heap.iter().map(Piece::value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature(previous, total));
        }
        if error <= (rel_tol * total.abs()).max(abs_tol) {
            return Ok(total);
        }
        if heap.len() >= MAX_PIECES {
            return Err(Error::Quadrature(previous, total));
        }
        previous = total;
        let worst = heap.pop().expect("nonempty heap");
        let m = 0.5 * (worst.a + worst.b);
        heap.push(Piece::new(f, worst.a, m, worst.left)?);
        heap.push(Piece::new(f, m, worst.b, worst.right)?);
    }
}

/// Relative tolerance of the nested polar quadrature.
const REL_TOL: f64 = 1e-6;
const ANGULAR_PIECES: usize = 16;

/// Where the coefficients of the growth integral come from.
#[derive(Clone, Debug)]
pub enum CoefficientContext {
    /// Integrand `|b_j(z)|^{1/(k-j)}` of an equation posed on the disc.
    Disc(LinearODE),
    /// Integrand `|a_j(T(z)) T'(z)^{k-j}|^{1/(k-j)}` for an equation on `T(𝔻)`.
    Pullback {
        ode: LinearODE,
        map: ConformalMapSpec,
    },
}

impl CoefficientContext {
    pub fn order(&self) -> usize {
        match self {
            Self::Disc(ode) | Self::Pullback { ode, .. } => ode.order(),
        }
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j + 2 > self.order() {
            return Err(Error::InvalidInput(format!(
                "coefficient index {j} exceeds k - 2 = {}",
                self.order() - 2
            )));
        }
        Ok(())
    }

    /// The integrand at a disc point.
    pub fn density(&self, j: usize, z: Complex64) -> Result<f64> {
        let k = self.order();
        let p = 1.0 / (k - j) as f64;
        match self {
            Self::Disc(ode) => Ok(ode.coeff(j).value_at(z)?.norm().powf(p)),
            Self::Pullback { ode, map } => {
                let w = map.eval(z)?;
                let a = ode.coeff(j).value_at(w)?.norm();
                Ok(a.powf(p) * map.derivative(z)?.norm())
            }
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!(
            "radius {r} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// `∫_{r0 < |z| < r1} density dm` by nested adaptive quadrature in polar coordinates.
fn annulus_integral(density: &dyn Fn(Complex64) -> Result<f64>, r0: f64, r1: f64) -> Result<f64> {
    let mut radial = |rho: f64| -> Result<f64> {
        let mut angular = |theta: f64| density(Complex64::from_polar(rho, theta));
        Ok(rho * adaptive_integral(&mut angular, -PI, PI, ANGULAR_PIECES, REL_TOL, 1e-300)?)
    };
    adaptive_integral(&mut radial, r0, r1, 4, REL_TOL, 1e-300)
}

/// `∫_{D(0,r)} |a_j(T(z)) T'(z)^{k-j}|^{1/(k-j)} dm(z)` (or the disc-side
/// analogue, see [`CoefficientContext`]).
pub fn coefficient_integral(ctx: &CoefficientContext, j: usize, r: f64) -> Result<f64> {
    ctx.check_index(j)?;
    check_radius(r)?;
    annulus_integral(&|z| ctx.density(j, z), 0.0, r)
}

/// Coefficient integrals at increasing radii, accumulated over annuli.
pub fn coefficient_integrals(
    ctx: &CoefficientContext,
    j: usize,
    radii: &[f64],
) -> Result<Vec<f64>> {
    ctx.check_index(j)?;
    let mut out = Vec::with_capacity(radii.len());
    let (mut inner, mut acc) = (0.0, 0.0);
    for &r in radii {
        check_radius(r)?;
        if r < inner {
            return Err(Error::InvalidInput("radii must be increasing".into()));
        }
        acc += annulus_integral(&|z| ctx.density(j, z), inner, r)?;
        out.push(acc);
        inner = r;
    }
    Ok(out)
}

/// `∫_{T(D(0,r))} |a_j(w)|^{1/(k-j)} dm(w) / |T'(T^{-1}(w))|`, evaluated on
/// the image side with `w = T(z)`, `dm(w) = |T'(z)|² dm(z)`, and the image
/// derivative taken from its closed form in `w`.
pub fn image_side_integral(
    ode: &LinearODE,
    map: &ConformalMapSpec,
    j: usize,
    r: f64,
) -> Result<f64> {
    let k = ode.order();
    if j + 2 > k {
        return Err(Error::InvalidInput(format!(
            "coefficient index {j} exceeds k - 2"
        )));
    }
    check_radius(r)?;
    let p = 1.0 / (k - j) as f64;
    let density = |z: Complex64| -> Result<f64> {
        let w = map.eval(z)?;
        let jac = map.derivative(z)?.norm_sqr();
        Ok(ode.coeff(j).value_at(w)?.norm().powf(p) / map.deriv_at_image(w)? * jac)
    };
    annulus_integral(&density, 0.0, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::function::Expr;

    #[test]
    fn gauss_legendre_polynomials_exact() {
        let mut f = |x: f64| Ok(x.powi(15) + 3.0 * x.powi(4));
        let v = gl8(&mut f, 0.0, 1.0).unwrap();
        assert!((v - (1.0 / 16.0 + 0.6)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let eps = 1e-4;
        let mut f = |x: f64| Ok(eps / (x * x + eps * eps));
        let v = adaptive_integral(&mut f, -1.0, 1.0, 3, 1e-10, 0.0).unwrap();
        let expect = 2.0 * (1.0 / eps).atan();
        assert!((v - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn unit_density_gives_area() {
        let ode = LinearODE::from_exprs(
            2,
            vec![Expr::Constant {
                value: Complex64::new(1.0, 0.0),
            }],
            Domain::Plane,
        )
        .unwrap();
        let ctx = CoefficientContext::Pullback {
            ode,
            map: ConformalMapSpec::identity(),
        };
        let v = coefficient_integral(&ctx, 0, 0.7).unwrap();
        assert!((v - PI * 0.49).abs() < 1e-10);
        let vs = coefficient_integrals(&ctx, 0, &[0.3, 0.7]).unwrap();
        assert!((vs[1] - v).abs() < 1e-10 && (vs[0] - PI * 0.09).abs() < 1e-10);
    }

    #[test]
    fn zero_coefficient_gives_zero() {
        let ode = LinearODE::from_exprs(
            2,
            vec![Expr::Constant {
                value: Complex64::new(0.0, 0.0),
            }],
            Domain::Disc,
        )
        .unwrap();
        assert_eq!(
            coefficient_integral(&CoefficientContext::Disc(ode), 0, 0.5).unwrap(),
            0.0
        );
    }
}
