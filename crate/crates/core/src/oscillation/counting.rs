//! Zero moduli by recursive cell bisection, and the counting functions
//! `n(r)` and `N(r)` built from them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::contour::{count_zeros_detailed, Cell};
use crate::error::{Error, Result};
use crate::function::AnalyticFunction;

/// Radial width below which a cell is reported as a zero modulus.
pub const MODULUS_TOL: f64 = 1e-6;
/// Cells smaller than this that cannot be split are reported as one cluster.
const CLUSTER_TOL: f64 = 1e-4;
/// Angle added to the first cut of a full annulus.
const ROOT_CUT: f64 = 0.2718281828;
const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.47, 0.53, 0.41, 0.59];
const NEWTON_ITERATIONS: usize = 40;
/// Nodes of the grid on which `N` is interpolated for `∫ N(t)/(1-t) dt`.
const INTEGRATION_NODES: usize = 4000;

/// Newton's method on `g` from `start`, steps `-g/g'`. Returns the root
/// when it converges inside `cell`.
fn newton_in_cell(g: &dyn AnalyticFunction, cell: &Cell, start: Complex64) -> Option<Complex64> {
    let size =
        (cell.r1 - cell.r0).max(cell.r1 * (cell.theta1 - cell.theta0).min(std::f64::consts::TAU));
    let mut z = start;
    for _ in 0..NEWTON_ITERATIONS {
        let dlog = match g.log_jet(z) {
            Ok((_, d)) => d,
            Err(Error::VanishingConstant(_)) => return cell.contains(z).then_some(z),
            Err(_) => return None,
        };
        if dlog == Complex64::new(0.0, 0.0) || !dlog.is_finite() {
            return None;
        }
        let step = -dlog.inv();
        if !(step.norm() <= 2.0 * size) {
            return None;
        }
        z += step;
        if step.norm() <= 1e-14 * z.norm().max(1e-300) || step.norm() < 1e-15 {
            return cell.contains(z).then_some(z);
        }
    }
    None
}

fn split(cell: &Cell, fraction: f64) -> (Cell, Cell) {
    if cell.is_full_turn() {
        // two half turns; both rays move with the fraction, and the default
        // cut avoids the real and imaginary axes where symmetric zeros sit
        let t0 = cell.theta0 + ROOT_CUT + (fraction - 0.5) * TAU;
        let t1 = t0 + PI;
        return (
            Cell {
                theta0: t0,
                theta1: t1,
                ..*cell
            },
            Cell {
                theta0: t1,
                theta1: t0 + TAU,
                ..*cell
            },
        );
    }
    let radial = cell.r1 - cell.r0;
    let angular = cell.r1 * (cell.theta1 - cell.theta0);
    if angular > radial {
        let t = cell.theta0 + fraction * (cell.theta1 - cell.theta0);
        (Cell { theta1: t, ..*cell }, Cell { theta0: t, ..*cell })
    } else {
        let r = cell.r0 + fraction * radial;
        (Cell { r1: r, ..*cell }, Cell { r0: r, ..*cell })
    }
}

fn center(cell: &Cell) -> Complex64 {
    let t = if cell.is_full_turn() {
        cell.theta0
    } else {
        0.5 * (cell.theta0 + cell.theta1)
    };
    Complex64::from_polar(0.5 * (cell.r0 + cell.r1), t)
}

/// Order of the zero of `g` at the origin.
pub fn origin_order(g: &dyn AnalyticFunction) -> Result<usize> {
    const MAX_ORDER: usize = 24;
    let origin = Complex64::new(0.0, 0.0);
    match g.log_jet(origin) {
        Ok(_) => return Ok(0),
        Err(Error::VanishingConstant(_)) => {}
        Err(e) => return Err(e),
    }
    let jet = g.jet_at(origin, MAX_ORDER)?;
    let scale = jet.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    jet.coeffs()
        .iter()
        .position(|c| c.norm() > 1e-12 * scale)
        .ok_or(Error::ZeroCounting {
            radius: 0.0,
            reason: "function vanishes identically near the origin".into(),
        })
}

/// Zeros of `g` in a disc, by modulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroModuli {
    /// `(|z|, multiplicity)` for the zeros off the origin, sorted.
    pub moduli: Vec<(f64, usize)>,
    pub origin_order: usize,
    /// Radius of the disc actually searched.
    pub radius: f64,
}

/// Locates the moduli of all zeros of `g` in `|z| < r` by bisecting
/// annular-sector cells until each holds a single zero (polished by
/// Newton's method) or is thinner than [`MODULUS_TOL`].
pub fn locate_zero_moduli(g: &dyn AnalyticFunction, r: f64) -> Result<ZeroModuli> {
    let total = count_zeros_detailed(g, r)?;
    let origin = origin_order(g)?;
    let radius = total.radius;
    let mut moduli = Vec::new();
    let off_origin = total.count.checked_sub(origin).ok_or(Error::ZeroCounting {
        radius,
        reason: "fewer zeros in the disc than at the origin".into(),
    })?;
    if off_origin > 0 {
        let inner = if origin > 0 {
            inner_radius(g, origin, radius)?
        } else {
            0.0
        };
        let root = Cell {
            r0: inner,
            ..Cell::disc(radius)
        };
        let mut stack = vec![(root, off_origin)];
        while let Some((cell, count)) = stack.pop() {
            if count == 0 {
                continue;
            }
            if cell.r1 - cell.r0 <= MODULUS_TOL {
                moduli.push((0.5 * (cell.r0 + cell.r1), count));
                continue;
            }
            if count == 1 {
                if let Some(z) = newton_in_cell(g, &cell, center(&cell)) {
                    moduli.push((z.norm(), 1));
                    continue;
                }
            }
            let mut done = false;
            for fraction in SPLIT_FRACTIONS {
                let (first, second) = split(&cell, fraction);
                match first.count(g) {
                    Ok(n) if n <= count => {
                        stack.push((second, count - n));
                        stack.push((first, n));
                        done = true;
                        break;
                    }
                    _ => continue,
                }
            }
            // clusters below roundoff resolution cannot be split further
            if !done
                && (cell.r1 - cell.r0).max(cell.r1 * (cell.theta1 - cell.theta0)) <= CLUSTER_TOL
            {
                moduli.push((0.5 * (cell.r0 + cell.r1), count));
                done = true;
            }
            if !done {
                return Err(Error::ZeroCounting {
                    radius: cell.r1,
                    reason: format!("cannot split cell {cell:?} holding {count} zeros"),
                });
            }
        }
    }
    moduli.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ZeroModuli {
        moduli,
        origin_order: origin,
        radius,
    })
}

/// A radius so small that only the zero at the origin lies inside it.
fn inner_radius(g: &dyn AnalyticFunction, origin: usize, r: f64) -> Result<f64> {
    let mut rho = 1e-3 * r;
    for _ in 0..30 {
        if let Ok(c) = count_zeros_detailed(g, rho) {
            if c.count == origin {
                return Ok(c.radius);
            }
        }
        rho *= 0.25;
    }
    Err(Error::ZeroCounting {
        radius: rho,
        reason: "cannot isolate the zero at the origin".into(),
    })
}

/// One row of a counting table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountRecord {
    pub r: f64,
    pub n: usize,
    pub big_n: f64,
}

/// `n(r)` and `N(r) = ∫_0^r (n(t) - n(0))/t dt + n(0) log r` from the
/// located zeros, valid for `r` up to the searched radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingFunction {
    moduli: Vec<f64>,
    multiplicity: Vec<usize>,
    /// prefix sums of multiplicities and of `mult · log ρ`
    count_prefix: Vec<usize>,
    log_prefix: Vec<f64>,
    origin_order: usize,
    radius: f64,
}

impl CountingFunction {
    pub fn from_zeros(zeros: &ZeroModuli) -> Result<Self> {
        let mut moduli = Vec::with_capacity(zeros.moduli.len());
        let mut multiplicity = Vec::with_capacity(zeros.moduli.len());
        let mut count_prefix = vec![0];
        let mut log_prefix = vec![0.0];
        let mut last = 0.0;
        for &(rho, m) in &zeros.moduli {
            if !(rho > 0.0) || rho < last || m == 0 {
                return Err(Error::InvalidInput(
                    "zero moduli must be positive, sorted, with positive multiplicity".into(),
                ));
            }
            last = rho;
            moduli.push(rho);
            multiplicity.push(m);
            count_prefix.push(count_prefix.last().unwrap() + m);
            log_prefix.push(log_prefix.last().unwrap() + m as f64 * rho.ln());
        }
        Ok(Self {
            moduli,
            multiplicity,
            count_prefix,
            log_prefix,
            origin_order: zeros.origin_order,
            radius: zeros.radius,
        })
    }

    /// Counting function of a zero-free function.
    pub fn zero_free(radius: f64) -> Self {
        Self::from_zeros(&ZeroModuli {
            moduli: Vec::new(),
            origin_order: 0,
            radius,
        })
        .expect("empty zero set")
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn origin_order(&self) -> usize {
        self.origin_order
    }

    pub fn zero_count(&self) -> usize {
        self.origin_order + self.count_prefix.last().copied().unwrap_or(0)
    }

    /// Zeros in `|z| ≤ r`.
    pub fn n(&self, r: f64) -> usize {
        let idx = self.moduli.partition_point(|&rho| rho <= r);
        self.origin_order + self.count_prefix[idx]
    }

    /// Integrated counting function.
    pub fn big_n(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return if self.origin_order == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
        }
        let idx = self.moduli.partition_point(|&rho| rho < r);
        let inside = self.count_prefix[idx] as f64;
        inside * r.ln() - self.log_prefix[idx] + self.origin_order as f64 * r.ln()
    }

    pub fn records(&self, radii: &[f64]) -> Vec<CountRecord> {
        radii
            .iter()
            .map(|&r| CountRecord {
                r,
                n: self.n(r),
                big_n: self.big_n(r),
            })
            .collect()
    }

    /// `∫_0^s N(t)/(1-t) dt` for the piecewise-linear interpolant of `N` on
    /// nodes equispaced in `log 1/(1-t)`.
    pub fn integral_over_one_minus(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidInput(format!(
                "upper limit {s} must lie in (0, 1)"
            )));
        }
        if s > self.radius * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "upper limit {s} exceeds the counted radius {}",
                self.radius
            )));
        }
        if self.zero_count() == 0 {
            return Ok(0.0);
        }
        let m = INTEGRATION_NODES;
        let span = -(1.0 - s).ln();
        let node = |i: usize| {
            if i == m {
                s
            } else {
                1.0 - (-span * i as f64 / m as f64).exp()
            }
        };
        // with a zero at the origin N is -∞ at t = 0; start at the first node
        let first = if self.origin_order > 0 { 1 } else { 0 };
        let mut acc = 0.0;
        let (mut a, mut na) = (node(first), self.big_n(node(first)));
        for i in first + 1..=m {
            let b = node(i);
            let nb = self.big_n(b);
            // L(t) = p + q t; ∫_a^b L/(1-t) dt = (p+q) log((1-a)/(1-b)) - q (b-a)
            let q = (nb - na) / (b - a);
            let p = na - q * a;
            acc += (p + q) * ((1.0 - a) / (1.0 - b)).ln() - q * (b - a);
            a = b;
            na = nb;
        }
        Ok(acc)
    }
}

/// Counting function of `g` on `|z| < r`.
pub fn integrated_counting(g: &dyn AnalyticFunction, r: f64) -> Result<CountingFunction> {
    CountingFunction::from_zeros(&locate_zero_moduli(g, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::function::{Expr, ExprFunction, FnFunction};
    use crate::jet::ComplexJet;

    fn poly(roots: &[Complex64]) -> ExprFunction {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        ExprFunction::new(Expr::Polynomial { coeffs }, Domain::Plane).unwrap()
    }

    #[test]
    fn single_zero() {
        let g = poly(&[Complex64::new(0.0, 0.3)]);
        let n = integrated_counting(&g, 0.9).unwrap();
        assert_eq!(n.n(0.2), 0);
        assert_eq!(n.n(0.5), 1);
        assert_eq!(n.big_n(0.2), 0.0);
        assert!((n.big_n(0.8) - (0.8f64 / 0.3).ln()).abs() < 1e-12);
    }

    #[test]
    fn moduli_of_several_zeros() {
        let roots = [
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.2, 0.6),
            Complex64::new(-0.2, -0.6),
            Complex64::new(0.3, 0.3),
            Complex64::new(0.9, 0.2),
        ];
        let z = locate_zero_moduli(&poly(&roots), 0.8).unwrap();
        let mut expect: Vec<f64> = roots
            .iter()
            .map(|r| r.norm())
            .filter(|&r| r < 0.8)
            .collect();
        expect.sort_by(f64::total_cmp);
        assert_eq!(z.moduli.len(), expect.len());
        for ((got, m), e) in z.moduli.iter().zip(&expect) {
            assert_eq!(*m, 1);
            assert!((got - e).abs() < 1e-10, "{got} vs {e}");
        }
    }

    #[test]
    fn double_zero_and_origin() {
        let a = Complex64::new(0.4, 0.1);
        let g = FnFunction::new(Domain::Plane, move |z, order| {
            let v = ComplexJet::variable(z, order);
            let d = v.add_scalar(-a);
            Ok(&v * &(&d * &d))
        });
        let z = locate_zero_moduli(&g, 0.7).unwrap();
        assert_eq!(z.origin_order, 1);
        assert_eq!(z.moduli.len(), 1);
        assert_eq!(z.moduli[0].1, 2);
        assert!((z.moduli[0].0 - a.norm()).abs() < 1e-6);
        let n = CountingFunction::from_zeros(&z).unwrap();
        assert_eq!(n.n(0.6), 3);
        let r = 0.6f64;
        assert!((n.big_n(r) - (2.0 * (r / a.norm()).ln() + r.ln())).abs() < 1e-5);
    }

    #[test]
    fn one_minus_integral_of_single_zero() {
        let zeros = ZeroModuli {
            moduli: vec![(0.3, 1)],
            origin_order: 0,
            radius: 0.95,
        };
        let n = CountingFunction::from_zeros(&zeros).unwrap();
        let s = 0.9;
        // exact: ∫_{0.3}^{s} log(t/0.3)/(1-t) dt, by composite Simpson
        let m = 200_000;
        let h = (s - 0.3) / m as f64;
        let f = |t: f64| (t / 0.3f64).ln() / (1.0 - t);
        let mut simpson = f(0.3) + f(s);
        for i in 1..m {
            simpson += f(0.3 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        simpson *= h / 3.0;
        let got = n.integral_over_one_minus(s).unwrap();
        assert!((got - simpson).abs() < 1e-4 * simpson, "{got} vs {simpson}");
    }

    #[test]
    fn zeros_on_both_axes() {
        let roots = [0.2, -0.2, 0.45, -0.45].map(|x| Complex64::new(x, 0.0));
        let roots: Vec<Complex64> = roots
            .iter()
            .chain(&[Complex64::new(0.0, 0.6), Complex64::new(0.0, -0.6)])
            .copied()
            .collect();
        let z = locate_zero_moduli(&poly(&roots), 0.8).unwrap();
        let moduli: Vec<f64> = z.moduli.iter().map(|m| m.0).collect();
        let expected = [0.2, 0.2, 0.45, 0.45, 0.6, 0.6];
        assert_eq!(moduli.len(), expected.len());
        for (a, b) in moduli.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{moduli:?}");
        }
    }
}
