//! Closed-form conformal maps `T: 𝔻 → Ω`.
//!
//! Every kind is univalent on the unit disc. Fractional powers and logarithms
//! use principal branches; on `𝔻` the arguments of those powers stay in the
//! right half-plane, so the principal branch is analytic there.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::ComplexJet;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance for the round-trip check inside [`ConformalMapSpec::inverse`].
const INVERSE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConformalMapSpec {
    /// `(a z + b) / (c z + d)`, with the pole outside the open unit disc.
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `ζ (1 - (1 - z ζ̄)^α)`: a petal with a corner of opening `απ` at `ζ`.
    StolzPetal { alpha: f64, zeta: Complex64 },
    /// `ζ + (1 - |ζ|) z`: a disc internally tangent to the unit circle at `ζ/|ζ|`.
    Horodisc { zeta: Complex64 },
    /// `e^{iφ} ((1 + z)/(1 - z))^α`: a sector of opening `απ` bisected by the ray `arg w = φ`.
    Sector { alpha: f64, phi: f64 },
    /// `α e^{iφ} log((1 + z)/(1 - z))`: a strip of width `απ`.
    Strip { alpha: f64, phi: f64 },
}

impl ConformalMapSpec {
    pub fn identity() -> Self {
        Self::Mobius {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// The Cayley map `(1 + z)/(1 - z)` onto the right half-plane.
    pub fn cayley() -> Self {
        Self::Mobius {
            a: ONE,
            b: ONE,
            c: -ONE,
            d: ONE,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mobius { .. } => "mobius",
            Self::StolzPetal { .. } => "stolz_petal",
            Self::Horodisc { .. } => "horodisc",
            Self::Sector { .. } => "sector",
            Self::Strip { .. } => "strip",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMap(msg));
        match *self {
            Self::Mobius { a, b, c, d } => {
                let det = a * d - b * c;
                if !(det.norm() > 0.0) || ![a, b, c, d].iter().all(|x| x.is_finite()) {
                    return bad("mobius: ad - bc must be nonzero and finite".into());
                }
                if c != ZERO {
                    let pole = -d / c;
                    if pole.norm() < 1.0 {
                        return bad(format!("mobius: pole {pole} lies inside the unit disc"));
                    }
                }
            }
            Self::StolzPetal { alpha, zeta } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return bad(format!("stolz_petal: alpha = {alpha} must lie in (0, 1)"));
                }
                if (zeta.norm() - 1.0).abs() > 1e-12 {
                    return bad(format!("stolz_petal: zeta = {zeta} must be unimodular"));
                }
            }
            Self::Horodisc { zeta } => {
                let r = zeta.norm();
                if !(r > 0.0 && r < 1.0) {
                    return bad(format!("horodisc: |zeta| = {r} must lie in (0, 1)"));
                }
            }
            Self::Sector { alpha, phi } => {
                if !(alpha > 0.0 && alpha < 2.0) || !phi.is_finite() {
                    return bad(format!("sector: alpha = {alpha} must lie in (0, 2)"));
                }
            }
            Self::Strip { alpha, phi } => {
                if !(alpha > 0.0 && alpha.is_finite()) || !phi.is_finite() {
                    return bad(format!("strip: alpha = {alpha} must be positive"));
                }
            }
        }
        Ok(())
    }

    fn check_disc(z: Complex64) -> Result<()> {
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDisc(z));
        }
        Ok(())
    }

    /// `T(z)` for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Self::check_disc(z)?;
        Ok(match *self {
            Self::Mobius { a, b, c, d } => (a * z + b) / (c * z + d),
            Self::StolzPetal { alpha, zeta } => zeta * (ONE - (ONE - z * zeta.conj()).powf(alpha)),
            Self::Horodisc { zeta } => zeta + z * (1.0 - zeta.norm()),
            Self::Sector { alpha, phi } => {
                Complex64::from_polar(1.0, phi) * ((ONE + z) / (ONE - z)).powf(alpha)
            }
            Self::Strip { alpha, phi } => {
                Complex64::from_polar(alpha, phi) * ((ONE + z) / (ONE - z)).ln()
            }
        })
    }

    /// Jet of `T` at `z`, built from elementary jets.
    pub fn jet(&self, z: Complex64, order: usize) -> Result<ComplexJet> {
        Self::check_disc(z)?;
        let v = ComplexJet::variable(z, order);
        let one = ComplexJet::constant(z, ONE, order);
        Ok(match *self {
            Self::Mobius { a, b, c, d } => {
                let num = v.scale(a).add_scalar(b);
                let den = v.scale(c).add_scalar(d);
                num.checked_div(&den)?
            }
            Self::StolzPetal { alpha, zeta } => {
                let base = &one - &v.scale(zeta.conj());
                (&one - &base.powf(alpha)?).scale(zeta)
            }
            Self::Horodisc { zeta } => v
                .scale(Complex64::new(1.0 - zeta.norm(), 0.0))
                .add_scalar(zeta),
            Self::Sector { alpha, phi } => {
                let u = (&one + &v).checked_div(&(&one - &v))?;
                u.powf(alpha)?.scale(Complex64::from_polar(1.0, phi))
            }
            Self::Strip { alpha, phi } => {
                let u = (&one + &v).checked_div(&(&one - &v))?;
                u.ln()?.scale(Complex64::from_polar(alpha, phi))
            }
        })
    }

    /// `T'(z)`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.jet(z, 1)?.coeff(1))
    }

    fn derivative_at_origin(&self) -> Complex64 {
        match *self {
            Self::Mobius { a, b, c, d } => (a * d - b * c) / (d * d),
            Self::StolzPetal { alpha, zeta } => alpha * zeta.norm_sqr() * ONE,
            Self::Horodisc { zeta } => Complex64::new(1.0 - zeta.norm(), 0.0),
            Self::Sector { alpha, phi } | Self::Strip { alpha, phi } => {
                Complex64::from_polar(2.0 * alpha, phi)
            }
        }
    }

    /// A branch of `log T'(z)` that is analytic on all of `𝔻` and equals the
    /// principal logarithm at `z = 0`.
    pub fn log_derivative(&self, z: Complex64) -> Result<Complex64> {
        Self::check_disc(z)?;
        let raw = |z: Complex64| -> Complex64 {
            match *self {
                Self::Mobius { a, b, c, d } => {
                    // cz + d = d (1 + (c/d) z) with |c/d| <= 1
                    let det = a * d - b * c;
                    det.ln() - 2.0 * (d.ln() + (ONE + (c / d) * z).ln())
                }
                Self::StolzPetal { alpha, zeta } => {
                    alpha.ln() + (alpha - 1.0) * (ONE - z * zeta.conj()).ln()
                }
                Self::Horodisc { zeta } => Complex64::new((1.0 - zeta.norm()).ln(), 0.0),
                Self::Sector { alpha, phi } => {
                    Complex64::new((2.0 * alpha).ln(), phi) + (alpha - 1.0) * (ONE + z).ln()
                        - (alpha + 1.0) * (ONE - z).ln()
                }
                Self::Strip { alpha, phi } => {
                    Complex64::new((2.0 * alpha).ln(), phi) - (ONE - z * z).ln()
                }
            }
        };
        let at_origin = raw(ZERO);
        let principal = self.derivative_at_origin().ln();
        let sheets = ((principal.im - at_origin.im) / (2.0 * PI)).round();
        Ok(raw(z) + Complex64::new(0.0, 2.0 * PI * sheets))
    }

    /// `T''(z)/T'(z)`, the derivative of [`Self::log_derivative`].
    pub fn log_derivative_slope(&self, z: Complex64) -> Result<Complex64> {
        Self::check_disc(z)?;
        Ok(match *self {
            Self::Mobius { c, d, .. } => -2.0 * c / (c * z + d),
            Self::StolzPetal { alpha, zeta } => {
                -(alpha - 1.0) * zeta.conj() / (ONE - z * zeta.conj())
            }
            Self::Horodisc { .. } => ZERO,
            Self::Sector { alpha, .. } => (alpha - 1.0) / (ONE + z) + (alpha + 1.0) / (ONE - z),
            Self::Strip { .. } => 2.0 * z / (ONE - z * z),
        })
    }

    /// `T^{-1}(w)`; fails when `w` is not in `T(𝔻)`.
    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        if !w.is_finite() {
            return Err(Error::OutsideImage(w));
        }
        let z = match *self {
            Self::Mobius { a, b, c, d } => (d * w - b) / (a - c * w),
            Self::StolzPetal { alpha, zeta } => {
                zeta * (ONE - (ONE - w * zeta.conj()).powf(1.0 / alpha))
            }
            Self::Horodisc { zeta } => (w - zeta) / (1.0 - zeta.norm()),
            Self::Sector { alpha, phi } => {
                let u = self.sector_root(w, alpha, phi);
                (u - ONE) / (u + ONE)
            }
            Self::Strip { alpha, phi } => {
                let v = Complex64::from_polar(1.0 / alpha, -phi) * w;
                if v.im.abs() >= PI / 2.0 {
                    return Err(Error::OutsideImage(w));
                }
                let u = v.exp();
                (u - ONE) / (u + ONE)
            }
        };
        if !(z.norm() < 1.0) || !z.is_finite() {
            return Err(Error::OutsideImage(w));
        }
        let back = self.eval(z)?;
        if (back - w).norm() > INVERSE_TOL * w.norm().max(1.0) {
            return Err(Error::OutsideImage(w));
        }
        Ok(z)
    }

    /// `((e^{-iφ} w))^{1/α}` on the principal sheet: the preimage of `w` in the
    /// right half-plane under `u ↦ e^{iφ} u^α`.
    fn sector_root(&self, w: Complex64, alpha: f64, phi: f64) -> Complex64 {
        (Complex64::from_polar(1.0, -phi) * w).powf(1.0 / alpha)
    }

    /// `|T'(T^{-1}(w))|` from the closed form of each kind.
    pub fn deriv_at_image(&self, w: Complex64) -> Result<f64> {
        // membership check
        self.inverse(w)?;
        Ok(match *self {
            Self::Mobius { a, b, c, d } => (a - c * w).norm_sqr() / (a * d - b * c).norm(),
            Self::StolzPetal { alpha, zeta } => alpha * (zeta - w).norm().powf(1.0 - 1.0 / alpha),
            Self::Horodisc { zeta } => 1.0 - zeta.norm(),
            Self::Sector { alpha, phi } => {
                // |w^{1/α} + e^{iφ/α}| with w^{1/α} = e^{iφ/α} u
                let u = self.sector_root(w, alpha, phi);
                0.5 * alpha * w.norm().powf(1.0 - 1.0 / alpha) * (u + ONE).norm_sqr()
            }
            Self::Strip { alpha, phi } => {
                let v = Complex64::from_polar(1.0 / alpha, -phi) * w;
                0.5 * alpha * (v.exp() + ONE).norm_sqr() * (-v.re).exp()
            }
        })
    }

    /// Schwarzian derivative `S_T(z) = T'''/T' - (3/2)(T''/T')^2`.
    pub fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        let j = self.jet(z, 3)?;
        let d1 = j.coeff(1);
        let d2 = j.coeff(2) * 2.0;
        let d3 = j.coeff(3) * 6.0;
        let q = d2 / d1;
        Ok(d3 / d1 - 1.5 * q * q)
    }

    /// Lower bound `(1 - |z|^2) |T'(z)| / 4` on the distance from `T(z)` to
    /// the boundary of `T(𝔻)` (Koebe quarter theorem).
    pub fn boundary_distance_bound(&self, z: Complex64) -> Result<f64> {
        Ok(0.25 * (1.0 - z.norm_sqr()) * self.derivative(z)?.norm())
    }

    /// `w ∈ T(D(0, r))`.
    pub fn image_contains(&self, w: Complex64, r: f64) -> bool {
        self.inverse(w).map(|z| z.norm() < r).unwrap_or(false)
    }
}

pub fn map_eval(map: &ConformalMapSpec, z: Complex64) -> Result<Complex64> {
    map.eval(z)
}

pub fn map_jet(map: &ConformalMapSpec, z: Complex64, order: usize) -> Result<ComplexJet> {
    map.jet(z, order)
}

pub fn map_inverse(map: &ConformalMapSpec, w: Complex64) -> Result<Complex64> {
    map.inverse(w)
}

pub fn deriv_at_image(map: &ConformalMapSpec, w: Complex64) -> Result<f64> {
    map.deriv_at_image(w)
}

pub fn schwarzian(map: &ConformalMapSpec, z: Complex64) -> Result<Complex64> {
    map.schwarzian(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sector_maps_origin_to_one() {
        let t = ConformalMapSpec::Sector {
            alpha: 1.3,
            phi: 0.0,
        };
        assert_relative_eq!(t.eval(ZERO).unwrap().re, 1.0);
        assert_relative_eq!(t.derivative(ZERO).unwrap().re, 2.6, max_relative = 1e-14);
    }

    #[test]
    fn horodisc_maps_origin_to_zeta() {
        let zeta = c(0.3, 0.4);
        let t = ConformalMapSpec::Horodisc { zeta };
        assert_eq!(t.eval(ZERO).unwrap(), zeta);
        assert_relative_eq!(
            t.deriv_at_image(c(0.35, 0.45)).unwrap(),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn stolz_petal_vertex_limit() {
        let zeta = Complex64::from_polar(1.0, 0.7);
        let t = ConformalMapSpec::StolzPetal { alpha: 0.6, zeta };
        let near = t.eval(zeta * (1.0 - 1e-8)).unwrap();
        assert!((near - zeta).norm() < 1e-4);
    }

    #[test]
    fn cayley_jet_is_geometric() {
        let j = ConformalMapSpec::cayley().jet(ZERO, 2).unwrap();
        assert_eq!(j.coeffs(), &[ONE, c(2.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(ConformalMapSpec::cayley().inverse(ONE).unwrap(), ZERO);
    }

    #[test]
    fn strip_inverse_of_origin() {
        let t = ConformalMapSpec::Strip {
            alpha: 1.0,
            phi: 0.0,
        };
        assert!(t.inverse(ZERO).unwrap().norm() < 1e-16);
        assert!(matches!(
            t.inverse(c(0.0, 2.0)),
            Err(Error::OutsideImage(_))
        ));
    }

    #[test]
    fn evaluation_outside_disc_fails() {
        let t = ConformalMapSpec::Sector {
            alpha: 1.0,
            phi: 0.0,
        };
        assert!(matches!(t.eval(c(1.0, 0.0)), Err(Error::OutsideDisc(_))));
        assert!(matches!(t.jet(c(0.0, -1.5), 2), Err(Error::OutsideDisc(_))));
        assert!(matches!(
            t.schwarzian(c(2.0, 0.0)),
            Err(Error::OutsideDisc(_))
        ));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ConformalMapSpec::Horodisc { zeta: c(1.0, 0.0) }
            .validate()
            .is_err());
        assert!(ConformalMapSpec::Sector {
            alpha: 2.0,
            phi: 0.0
        }
        .validate()
        .is_err());
        assert!(ConformalMapSpec::StolzPetal {
            alpha: 0.5,
            zeta: c(0.5, 0.0)
        }
        .validate()
        .is_err());
        assert!(ConformalMapSpec::Mobius {
            a: ONE,
            b: ZERO,
            c: ONE,
            d: c(0.5, 0.0)
        }
        .validate()
        .is_err());
        assert!(ConformalMapSpec::cayley().validate().is_ok());
    }

    #[test]
    fn json_field_names() {
        let t: ConformalMapSpec =
            serde_json::from_str(r#"{"kind": "sector", "alpha": 1.5, "phi": 0.0}"#).unwrap();
        assert_eq!(
            t,
            ConformalMapSpec::Sector {
                alpha: 1.5,
                phi: 0.0
            }
        );
        let s = serde_json::to_string(&ConformalMapSpec::Horodisc { zeta: c(0.5, 0.0) }).unwrap();
        assert_eq!(s, r#"{"kind":"horodisc","zeta":[0.5,0.0]}"#);
    }

    #[test]
    fn log_derivative_matches_principal_at_origin() {
        let t = ConformalMapSpec::Sector {
            alpha: 1.5,
            phi: 3.0 * PI,
        };
        let l = t.log_derivative(ZERO).unwrap();
        assert!((l - t.derivative(ZERO).unwrap().ln()).norm() < 1e-14);
        let z = c(-0.3, 0.6);
        assert!((l.exp() - t.derivative(ZERO).unwrap()).norm() < 1e-13);
        assert!((t.log_derivative(z).unwrap().exp() - t.derivative(z).unwrap()).norm() < 1e-12);
    }
}
