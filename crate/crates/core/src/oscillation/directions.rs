//! Directions in which exponential sums `Σ C_j e^{r_j w}` oscillate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Vertices of the convex hull in counterclockwise order, collinear points dropped.
fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn normalize(angle: f64) -> f64 {
    if angle <= -PI {
        angle + 2.0 * PI
    } else {
        angle
    }
}

/// Outer-normal angles in `(-π, π]` of the edges of the convex hull of the
/// conjugated roots, sorted. For a degenerate hull (a segment) the two
/// perpendicular directions are returned.
pub fn exp_sum_directions(roots: &[Complex64]) -> Result<Vec<f64>> {
    if roots.len() < 2 {
        return Err(Error::InvalidInput("at least two roots are needed".into()));
    }
    if roots.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidInput("roots must be finite".into()));
    }
    let conj: Vec<Complex64> = roots.iter().map(|r| r.conj()).collect();
    let hull = convex_hull(&conj);
    let mut angles = match hull.len() {
        0 | 1 => return Err(Error::InvalidInput("all roots coincide".into())),
        2 => {
            let e = hull[1] - hull[0];
            vec![normalize((-e.re).atan2(e.im)), normalize(e.re.atan2(-e.im))]
        }
        n => (0..n)
            .map(|i| {
                let e = hull[(i + 1) % n] - hull[i];
                // outer normal of a counterclockwise edge: (e_y, -e_x)
                normalize((-e.re).atan2(e.im))
            })
            .collect(),
    };
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_pair() {
        let d = exp_sum_directions(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(d, vec![-PI / 2.0, PI / 2.0]);
    }

    #[test]
    fn square() {
        let d =
            exp_sum_directions(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]).unwrap();
        let expect = [-0.75 * PI, -0.25 * PI, 0.25 * PI, 0.75 * PI];
        for (a, b) in d.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{d:?}");
        }
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn collinear_and_equal() {
        let d = exp_sum_directions(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(d, vec![-PI / 2.0, PI / 2.0]);
        assert!(exp_sum_directions(&[c(1.0, 1.0), c(1.0, 1.0)]).is_err());
    }
}
