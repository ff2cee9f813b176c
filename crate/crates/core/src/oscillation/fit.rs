//! Power-law exponents of quantities blowing up at the unit circle.

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 5;

/// Least-squares slope of `log v` against `log 1/(1-r)`, so that
/// `v ≍ (1-r)^{-slope}`.
pub fn growth_exponent_fit(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let mut points = Vec::with_capacity(samples.len());
    for &(r, v) in samples {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidInput(format!(
                "sample radius {r} must lie in [0, 1)"
            )));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample value {v} at r = {r} must be positive"
            )));
        }
        points.push((-(1.0 - r).ln(), v.ln()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput(
            "sample radii must not all coincide".into(),
        ));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radii() -> Vec<f64> {
        (0..10).map(|i| 1.0 - 0.5 * 0.6f64.powi(i)).collect()
    }

    #[test]
    fn exact_powers() {
        let s: Vec<_> = radii()
            .into_iter()
            .map(|r| (r, (1.0 - r).powi(-2)))
            .collect();
        assert!((growth_exponent_fit(&s).unwrap() - 2.0).abs() < 1e-12);
        let s: Vec<_> = radii().into_iter().map(|r| (r, 3.0)).collect();
        assert!(growth_exponent_fit(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_samples() {
        let mut s: Vec<_> = radii().into_iter().map(|r| (r, 1.0)).collect();
        s[3].1 = 0.0;
        assert!(growth_exponent_fit(&s).is_err());
        assert!(growth_exponent_fit(&s[..3]).is_err());
    }
}
