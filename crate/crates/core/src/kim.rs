//! Recovery of the coefficients of a normalized equation from a solution base.
//!
//! With `y_i = g_i / g_k` and `W_j` the `(k-1)×(k-1)` determinant of
//! `[y_i^(m)]` over derivative orders `m ∈ {1..k} \ {j}`,
//!
//! ```text
//! b_j = Σ_{i=0}^{k-j} (-1)^{2k-i} δ_{ki} C(k-i, k-i-j) (W_{k-i}/W_k) R^{(k-i-j)}/R,
//! ```
//!
//! where `R = W_k^{1/k}`, `δ_kk = 0` and `δ_ki = 1` otherwise. The factor
//! `(-1)^{2k-i}` equals `(-1)^i` and is kept as written.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::Func;
use crate::jet::ComplexJet;
use crate::linalg::determinant;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Determinant of `[y_i^(m)]` over the derivative orders `rows`, as a jet.
fn minor(derivs: &[Vec<ComplexJet>], rows: &[usize]) -> Result<ComplexJet> {
    let matrix: Vec<Vec<ComplexJet>> = rows
        .iter()
        .map(|&m| derivs.iter().map(|d| d[m].clone()).collect())
        .collect();
    determinant(&matrix)
}

/// `b_0(z), ..., b_{k-2}(z)` from `k` independent solutions.
pub fn kim_recover(solutions: &[Func], z: Complex64) -> Result<Vec<Complex64>> {
    let k = solutions.len();
    if k < 2 {
        return Err(Error::InvalidInput(
            "at least two solutions are needed".into(),
        ));
    }
    let order = 2 * k + 2;
    let jets = solutions
        .iter()
        .map(|g| g.jet_at(z, order))
        .collect::<Result<Vec<_>>>()?;
    let last = &jets[k - 1];
    if last.value() == Complex64::new(0.0, 0.0) {
        return Err(Error::VanishingConstant(z));
    }
    // derivs[i][m] = y_i^(m) as a jet of common order
    let common = order - k;
    let mut derivs = Vec::with_capacity(k - 1);
    for g in &jets[..k - 1] {
        let y = g.checked_div(last)?;
        let row = (0..=k)
            .map(|m| Ok(y.derivative(m)?.truncate(common)))
            .collect::<Result<Vec<_>>>()?;
        derivs.push(row);
    }
    let rows_without = |j: usize| -> Vec<usize> { (1..=k).filter(|&m| m != j).collect() };

    let wk = minor(&derivs, &rows_without(k))?;
    let wk0 = wk.value();
    let scale = derivs
        .iter()
        .flat_map(|d| d[1..].iter().map(|x| x.value().norm()))
        .fold(0.0, f64::max);
    if !(wk0.norm() > 1e-300) || wk0.norm() <= 1e-14 * scale.powi(k as i32 - 1) {
        return Err(Error::Singular(wk0.norm()));
    }
    let root = wk.powc(Complex64::new(1.0 / k as f64, 0.0), None)?;
    let root_ratio: Vec<Complex64> = (0..=k)
        .map(|m| Ok(root.derivative_value(m) / root.value()))
        .collect::<Result<_>>()?;
    let w_values: Vec<Complex64> = (1..=k)
        .map(|j| {
            if j == k {
                Ok(wk0)
            } else {
                Ok(minor(&derivs, &rows_without(j))?.value())
            }
        })
        .collect::<Result<_>>()?;

    let mut b = Vec::with_capacity(k - 1);
    for j in 0..=k - 2 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=k - j {
            if i == k {
                continue; // δ_kk = 0
            }
            let sign = if (2 * k - i) % 2 == 0 { 1.0 } else { -1.0 };
            let w_ratio = w_values[k - i - 1] / wk0;
            acc += sign * binomial(k - i, k - i - j) * w_ratio * root_ratio[k - i - j];
        }
        b.push(acc);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::function::FnFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_fn(rate: Complex64) -> Func {
        FnFunction::new(Domain::Plane, move |z, order| {
            Ok(ComplexJet::variable(z, order).scale(rate).exp())
        })
        .shared()
    }

    #[test]
    fn harmonic_oscillator() {
        let basis = vec![exp_fn(c(0.0, 1.0)), exp_fn(c(0.0, -1.0))];
        for z in [c(0.0, 0.0), c(0.7, -0.3)] {
            let b = kim_recover(&basis, z).unwrap();
            assert!((b[0] - c(1.0, 0.0)).norm() < 1e-12, "{b:?}");
        }
    }

    #[test]
    fn third_order_constant_coefficients() {
        // roots 1, 2, -3: r^3 - 7r + 6
        let basis = vec![
            exp_fn(c(1.0, 0.0)),
            exp_fn(c(2.0, 0.0)),
            exp_fn(c(-3.0, 0.0)),
        ];
        let b = kim_recover(&basis, c(0.2, 0.1)).unwrap();
        assert!((b[0] - c(6.0, 0.0)).norm() < 1e-10, "{b:?}");
        assert!((b[1] - c(-7.0, 0.0)).norm() < 1e-10, "{b:?}");
    }

    #[test]
    fn dependent_base_is_singular() {
        let basis = vec![exp_fn(c(1.0, 0.0)), exp_fn(c(1.0, 0.0))];
        assert!(matches!(
            kim_recover(&basis, c(0.0, 0.0)),
            Err(Error::Singular(_))
        ));
    }
}
