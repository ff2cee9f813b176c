//! Domains on which coefficients and solutions live.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::conformal::ConformalMapSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Plane,
    /// The open unit disc.
    Disc,
    /// `Re w > 0`.
    RightHalfPlane,
    /// The image `T(𝔻)` of a catalog map.
    Image(ConformalMapSpec),
}

impl Domain {
    pub fn contains(&self, w: Complex64) -> bool {
        if !w.is_finite() {
            return false;
        }
        match self {
            Self::Plane => true,
            Self::Disc => w.norm() < 1.0,
            Self::RightHalfPlane => w.re > 0.0,
            Self::Image(t) => t.inverse(w).is_ok(),
        }
    }

    /// A lower bound for the distance from `w` to the boundary (0 outside).
    pub fn boundary_distance(&self, w: Complex64) -> f64 {
        match self {
            Self::Plane => f64::INFINITY,
            Self::Disc => (1.0 - w.norm()).max(0.0),
            Self::RightHalfPlane => w.re.max(0.0),
            Self::Image(t) => match t.inverse(w) {
                Ok(z) => t.boundary_distance_bound(z).unwrap_or(0.0),
                Err(_) => 0.0,
            },
        }
    }

    /// Whether the open segment `[a, b]` lies in the domain without relying on
    /// sampling: true for convex domains when both ends are inside.
    pub fn is_convex(&self) -> bool {
        match self {
            Self::Plane | Self::Disc | Self::RightHalfPlane => true,
            Self::Image(t) => {
                matches!(
                    t,
                    ConformalMapSpec::Mobius { .. }
                        | ConformalMapSpec::Horodisc { .. }
                        | ConformalMapSpec::Strip { .. }
                ) || matches!(t, ConformalMapSpec::Sector { alpha, .. } if *alpha <= 1.0)
            }
        }
    }

    /// Spot check that `T(𝔻)` is contained in this domain, sampling `T` on
    /// circles close to the unit circle.
    pub fn admits(&self, t: &ConformalMapSpec) -> bool {
        if let Self::Image(own) = self {
            if own == t {
                return true;
            }
        }
        if matches!(self, Self::Plane) {
            return true;
        }
        const RADII: [f64; 6] = [0.0, 0.5, 0.9, 0.99, 0.999, 0.9999];
        const ANGLES: usize = 96;
        for r in RADII {
            for j in 0..ANGLES {
                let z =
                    Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / ANGLES as f64);
                match t.eval(z) {
                    Ok(w) if !w.is_finite() || self.contains(w) => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DomainRepr {
    Named(String),
    Map(ConformalMapSpec),
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Self::Plane => DomainRepr::Named("plane".into()),
            Self::Disc => DomainRepr::Named("disc".into()),
            Self::RightHalfPlane => DomainRepr::Named("right_half_plane".into()),
            Self::Image(t) => DomainRepr::Map(*t),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match DomainRepr::deserialize(d)? {
            DomainRepr::Named(name) => match name.as_str() {
                "plane" => Ok(Self::Plane),
                "disc" => Ok(Self::Disc),
                "right_half_plane" => Ok(Self::RightHalfPlane),
                other => Err(serde::de::Error::custom(format!(
                    "unknown domain `{other}` (expected plane, disc, right_half_plane or a map object)"
                ))),
            },
            DomainRepr::Map(t) => Ok(Self::Image(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_image_lies_in_right_half_plane() {
        assert!(Domain::RightHalfPlane.admits(&ConformalMapSpec::cayley()));
        assert!(Domain::Disc.admits(&ConformalMapSpec::identity()));
        assert!(!Domain::Disc.admits(&ConformalMapSpec::cayley()));
        let sector = ConformalMapSpec::Sector {
            alpha: 1.5,
            phi: 0.0,
        };
        assert!(!Domain::RightHalfPlane.admits(&sector));
        assert!(Domain::RightHalfPlane.admits(&ConformalMapSpec::Sector {
            alpha: 0.8,
            phi: 0.0
        }));
    }

    #[test]
    fn serde_round_trip() {
        for d in [
            Domain::Plane,
            Domain::Disc,
            Domain::RightHalfPlane,
            Domain::Image(ConformalMapSpec::cayley()),
        ] {
            let s = serde_json::to_string(&d).unwrap();
            assert_eq!(serde_json::from_str::<Domain>(&s).unwrap(), d);
        }
        assert!(serde_json::from_str::<Domain>("\"annulus\"").is_err());
    }

    #[test]
    fn distances() {
        assert_eq!(
            Domain::Disc.boundary_distance(Complex64::new(0.25, 0.0)),
            0.75
        );
        assert_eq!(
            Domain::RightHalfPlane.boundary_distance(Complex64::new(-1.0, 0.0)),
            0.0
        );
        let img = Domain::Image(ConformalMapSpec::identity());
        assert!((img.boundary_distance(Complex64::new(0.0, 0.0)) - 0.25).abs() < 1e-15);
    }
}
