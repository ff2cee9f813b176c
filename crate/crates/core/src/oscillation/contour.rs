//! Argument-principle zero counting on circles and annular sectors.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::quadrature::GL8;
use crate::error::{Error, Result};
use crate::function::AnalyticFunction;

/// Largest accepted distance of the winding sum from an integer.
pub const INTEGER_TOL: f64 = 0.01;
/// Radius perturbations tried after a failed count.
pub const MAX_RETRIES: usize = 5;

const PANEL_TOL: f64 = 1e-7;
const MAX_DEPTH: usize = 48;
/// Initial panels for a full circle.
const CIRCLE_PANELS: usize = 16;

/// A piece of an oriented contour.
#[derive(Clone, Copy, Debug)]
pub enum Segment {
    /// `r e^{iθ}` for `θ` from `from` to `to`.
    Arc { radius: f64, from: f64, to: f64 },
    /// The straight segment from `from` to `to`.
    Line { from: Complex64, to: Complex64 },
}

impl Segment {
    fn point(&self, t: f64) -> (Complex64, Complex64) {
        match *self {
            Segment::Arc { radius, from, to } => {
                let z = Complex64::from_polar(radius, from + (to - from) * t);
                (z, Complex64::new(0.0, to - from) * z)
            }
            Segment::Line { from, to } => (from + (to - from) * t, to - from),
        }
    }

    fn initial_panels(&self) -> usize {
        match *self {
            Segment::Arc { from, to, .. } => ((to - from).abs() / TAU * CIRCLE_PANELS as f64)
                .ceil()
                .max(1.0) as usize,
            Segment::Line { .. } => 2,
        }
    }
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// `∮ g'/g dz` along a segment, returned as its imaginary part (the
/// change of argument). Panels are split until the Gauss–Legendre value is
/// consistent with the change of `log g` between the panel ends and the
/// argument turns by less than a half turn.
fn argument_change(g: &dyn AnalyticFunction, seg: &Segment) -> Result<f64> {
    let n = seg.initial_panels();
    let ends: Vec<Complex64> = (0..=n)
        .map(|i| Ok(g.log_jet(seg.point(i as f64 / n as f64).0)?.0))
        .collect::<Result<_>>()?;
    let mut stack: Vec<(f64, f64, Complex64, Complex64, usize)> = (0..n)
        .rev()
        .map(|i| {
            (
                i as f64 / n as f64,
                (i + 1) as f64 / n as f64,
                ends[i],
                ends[i + 1],
                0,
            )
        })
        .collect();
    let mut total = 0.0;
    while let Some((a, b, la, lb, depth)) = stack.pop() {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut integral = Complex64::new(0.0, 0.0);
        for (x, w) in GL8 {
            let (z, dz) = seg.point(mid + half * x);
            integral += w * g.log_jet(z)?.1 * dz;
        }
        integral *= half;
        let change = lb - la;
        let ok = integral.im.abs() <= 3.0
            && (integral.im - wrap(change.im)).abs() <= PANEL_TOL
            && (integral.re - change.re).abs() <= PANEL_TOL * change.re.abs().max(1.0);
        if ok {
            total += integral.im;
            continue;
        }
        if depth >= MAX_DEPTH {
            let (z, _) = seg.point(mid);
            return Err(Error::ZeroCounting {
                radius: z.norm(),
                reason: format!("contour panel near {z} does not resolve"),
            });
        }
        let lm = g.log_jet(seg.point(mid).0)?.0;
        stack.push((mid, b, lm, lb, depth + 1));
        stack.push((a, mid, la, lm, depth + 1));
    }
    Ok(total)
}

/// Winding number of `g` along a closed contour, before rounding.
pub fn winding(g: &dyn AnalyticFunction, contour: &[Segment]) -> Result<f64> {
    let mut total = 0.0;
    for seg in contour {
        total += argument_change(g, seg)?;
    }
    Ok(total / TAU)
}

fn rounded(raw: f64, radius: f64) -> Result<usize> {
    let n = raw.round();
    if (raw - n).abs() >= INTEGER_TOL || n < 0.0 {
        return Err(Error::ZeroCounting {
            radius,
            reason: format!("winding sum {raw} is not an integer"),
        });
    }
    Ok(n as usize)
}

/// An annular sector `r0 ≤ |z| ≤ r1`, `θ0 ≤ arg z ≤ θ1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub r0: f64,
    pub r1: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl Cell {
    pub fn disc(r: f64) -> Self {
        Self {
            r0: 0.0,
            r1: r,
            theta0: -PI,
            theta1: PI,
        }
    }

    pub fn is_full_turn(&self) -> bool {
        self.theta1 - self.theta0 >= TAU - 1e-14
    }

    /// Positively oriented boundary.
    pub fn boundary(&self) -> Vec<Segment> {
        let Cell {
            r0,
            r1,
            theta0,
            theta1,
        } = *self;
        if self.is_full_turn() {
            let mut out = vec![Segment::Arc {
                radius: r1,
                from: theta0,
                to: theta0 + TAU,
            }];
            if r0 > 0.0 {
                out.push(Segment::Arc {
                    radius: r0,
                    from: theta0 + TAU,
                    to: theta0,
                });
            }
            return out;
        }
        let corner = |r: f64, t: f64| Complex64::from_polar(r, t);
        let mut out = vec![
            Segment::Arc {
                radius: r1,
                from: theta0,
                to: theta1,
            },
            Segment::Line {
                from: corner(r1, theta1),
                to: corner(r0, theta1),
            },
        ];
        if r0 > 0.0 {
            out.push(Segment::Arc {
                radius: r0,
                from: theta1,
                to: theta0,
            });
        }
        out.push(Segment::Line {
            from: corner(r0, theta0),
            to: corner(r1, theta0),
        });
        out
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if r < self.r0 || r > self.r1 {
            return false;
        }
        if self.is_full_turn() {
            return true;
        }
        let t = self.theta0 + (z.arg() - self.theta0).rem_euclid(TAU);
        t <= self.theta1
    }

    /// Number of zeros inside, by the argument principle.
    pub fn count(&self, g: &dyn AnalyticFunction) -> Result<usize> {
        rounded(winding(g, &self.boundary())?, self.r1)
    }
}

/// Result of counting zeros in a disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroCount {
    pub count: usize,
    /// Radius actually used, after any perturbation.
    pub radius: f64,
    /// Winding sum before rounding.
    pub raw: f64,
}

/// Counts the zeros of `g` in `|z| < r`, perturbing the radius by
/// multiples of `1e-4 (1-r)` when a zero sits too close to the circle.
pub fn count_zeros_detailed(g: &dyn AnalyticFunction, r: f64) -> Result<ZeroCount> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius {r} must be positive")));
    }
    let delta = 1e-4 * (1.0 - r).abs().max(1e-6);
    let mut last = None;
    for attempt in 0..=MAX_RETRIES {
        let shift = if attempt == 0 {
            0.0
        } else {
            ((attempt + 1) / 2) as f64 * if attempt % 2 == 1 { 1.0 } else { -1.0 }
        };
        let radius = r + shift * delta;
        let contour = [Segment::Arc {
            radius,
            from: -PI,
            to: PI,
        }];
        match winding(g, &contour).and_then(|raw| Ok((rounded(raw, radius)?, raw))) {
            Ok((count, raw)) => return Ok(ZeroCount { count, radius, raw }),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::ZeroCounting {
        radius: r,
        reason: "no attempt".into(),
    }))
}

/// Number of zeros of `g` in `|z| < r`.
pub fn count_zeros(g: &dyn AnalyticFunction, r: f64) -> Result<usize> {
    Ok(count_zeros_detailed(g, r)?.count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::function::{Expr, ExprFunction};

    fn poly(coeffs: &[(f64, f64)]) -> ExprFunction {
        let coeffs = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        ExprFunction::new(Expr::Polynomial { coeffs }, Domain::Plane).unwrap()
    }

    #[test]
    fn quadratic_has_two_zeros() {
        let g = poly(&[(-0.25, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(count_zeros(&g, 0.6).unwrap(), 2);
        assert_eq!(count_zeros(&g, 0.4).unwrap(), 0);
    }

    #[test]
    fn zero_on_circle_is_perturbed() {
        let g = poly(&[(-0.25, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let c = count_zeros_detailed(&g, 0.5).unwrap();
        assert_ne!(c.radius, 0.5);
        assert_eq!(c.count, if c.radius > 0.5 { 2 } else { 0 });
    }

    #[test]
    fn sector_cells() {
        // zeros at 0.5 and 0.5i
        let g = poly(&[(0.0, 0.25), (-0.5, -0.5), (1.0, 0.0)]);
        let q1 = Cell {
            r0: 0.2,
            r1: 0.8,
            theta0: -0.3,
            theta1: 0.3,
        };
        assert_eq!(q1.count(&g).unwrap(), 1);
        let slice = Cell {
            r0: 0.0,
            r1: 0.8,
            theta0: 1.0,
            theta1: 2.0,
        };
        assert_eq!(slice.count(&g).unwrap(), 1);
        let ring = Cell {
            r0: 0.6,
            r1: 0.9,
            theta0: -PI,
            theta1: PI,
        };
        assert_eq!(ring.count(&g).unwrap(), 0);
        assert!(slice.contains(Complex64::new(0.0, 0.5)) && !q1.contains(Complex64::new(0.0, 0.5)));
    }
}
