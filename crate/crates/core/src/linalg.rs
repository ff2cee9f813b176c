//! Small dense determinants and linear solves over complex numbers and jets.
//!
//! Jets form a local ring, so elimination pivots on the entry whose constant
//! term is largest in modulus; a matrix whose constant terms are all
//! (numerically) singular is rejected.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::ComplexJet;

pub trait Scalar: Clone {
    fn zero_like(like: &Self) -> Self;
    fn one_like(like: &Self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    /// Modulus of the value (constant term for jets), used for pivoting.
    fn magnitude(&self) -> f64;
}

impl Scalar for Complex64 {
    fn zero_like(_: &Self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(_: &Self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Ok(self / o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for ComplexJet {
    fn zero_like(like: &Self) -> Self {
        ComplexJet::constant(like.center(), Complex64::new(0.0, 0.0), like.order())
    }
    fn one_like(like: &Self) -> Self {
        ComplexJet::constant(like.center(), Complex64::new(1.0, 0.0), like.order())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.checked_div(o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.value().norm()
    }
}

fn scale_of<T: Scalar>(m: &[Vec<T>]) -> f64 {
    m.iter()
        .flatten()
        .map(Scalar::magnitude)
        .fold(0.0, f64::max)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Scalar>(matrix: &[Vec<T>]) -> Result<T> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if matrix.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput(
            "determinant of a non-square matrix".into(),
        ));
    }
    let mut a = matrix.to_vec();
    let like = a[0][0].clone();
    let scale = scale_of(&a);
    let mut det = T::one_like(&like);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].magnitude().total_cmp(&a[j][col].magnitude()))
            .unwrap();
        let p = a[pivot][col].magnitude();
        if p == 0.0 || p <= 1e-300 * scale.max(1e-300) {
            // exact zero pivot column: the determinant vanishes
            return Ok(T::zero_like(&like));
        }
        if pivot != col {
            a.swap(pivot, col);
            det = det.neg();
        }
        det = det.mul(&a[col][col]);
        for row in col + 1..n {
            let factor = a[row][col].div(&a[col][col])?;
            for k in col..n {
                let t = factor.mul(&a[col][k]);
                a[row][k] = a[row][k].sub(&t);
            }
        }
    }
    Ok(det)
}

/// Solves `A x = b`; fails when a pivot is smaller than `1e-13` times the
/// largest entry.
pub fn solve<T: Scalar>(matrix: &[Vec<T>], rhs: &[T]) -> Result<Vec<T>> {
    let n = matrix.len();
    if rhs.len() != n || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput(
            "dimension mismatch in linear solve".into(),
        ));
    }
    let mut a = matrix.to_vec();
    let mut b = rhs.to_vec();
    let scale = scale_of(&a);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].magnitude().total_cmp(&a[j][col].magnitude()))
            .unwrap();
        let p = a[pivot][col].magnitude();
        if !(p > 1e-13 * scale) {
            return Err(Error::Singular(p));
        }
        a.swap(pivot, col);
        b.swap(pivot, col);
        for row in col + 1..n {
            let factor = a[row][col].div(&a[col][col])?;
            for k in col..n {
                let t = factor.mul(&a[col][k]);
                a[row][k] = a[row][k].sub(&t);
            }
            let t = factor.mul(&b[col]);
            b[row] = b[row].sub(&t);
        }
    }
    let mut x: Vec<T> = Vec::with_capacity(n);
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for (k, xk) in (row + 1..n).zip(x.iter().rev()) {
            acc = acc.sub(&a[row][k].mul(xk));
        }
        x.push(acc.div(&a[row][row])?);
    }
    x.reverse();
    Ok(x)
}
