//! Truncated complex Taylor series ("jets").
//!
//! A [`ComplexJet`] of order `N` centered at `z0` stores the scaled Taylor
//! coefficients `c_m = f^(m)(z0) / m!` for `m = 0..=N`. Binary operations
//! truncate to the smaller of the two orders.
//!
//! The `checked_*` methods and the free functions return an error on center
//! mismatch. The arithmetic operator impls panic instead; they are meant for
//! internal code where every operand was built at the same center.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance used to accept a user supplied branch reference.
const BRANCH_TOL: f64 = 1e-8;
/// How many sheets on each side of the principal one are searched for a branch.
const BRANCH_SEARCH: i64 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexJet {
    center: Complex64,
    coeffs: Vec<Complex64>,
}

impl ComplexJet {
    /// Builds a jet from scaled Taylor coefficients. Fails on an empty or
    /// non-finite coefficient list.
    pub fn new(center: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "a jet needs at least one coefficient".into(),
            ));
        }
        if !center.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "jet coefficients must be finite".into(),
            ));
        }
        Ok(Self { center, coeffs })
    }

    pub fn constant(center: Complex64, value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        coeffs[0] = value;
        Self { center, coeffs }
    }

    /// The identity function `z` expanded at `center`.
    pub fn variable(center: Complex64, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        coeffs[0] = center;
        if order > 0 {
            coeffs[1] = ONE;
        }
        Self { center, coeffs }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs[m]
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `f^(m)(center)`.
    pub fn derivative_value(&self, m: usize) -> Complex64 {
        let fact: f64 = (2..=m).map(|i| i as f64).product();
        self.coeffs[m] * fact
    }

    /// All derivatives `f(center), f'(center), ..., f^(N)(center)`.
    pub fn derivative_values(&self) -> Vec<Complex64> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                if m > 1 {
                    fact *= m as f64;
                }
                c * fact
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = (order + 1).min(self.coeffs.len());
        Self {
            center: self.center,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    fn check_center(&self, other: &Self) -> Result<()> {
        if self.center != other.center {
            return Err(Error::CenterMismatch(self.center, other.center));
        }
        Ok(())
    }

    fn common_len(&self, other: &Self) -> usize {
        self.coeffs.len().min(other.coeffs.len())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let n = self.common_len(other);
        let coeffs = (0..n).map(|m| self.coeffs[m] + other.coeffs[m]).collect();
        Ok(Self {
            center: self.center,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let n = self.common_len(other);
        let coeffs = (0..n).map(|m| self.coeffs[m] - other.coeffs[m]).collect();
        Ok(Self {
            center: self.center,
            coeffs,
        })
    }

    /// Truncated Cauchy product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let n = self.common_len(other);
        let mut coeffs = vec![ZERO; n];
        for (m, out) in coeffs.iter_mut().enumerate() {
            let mut acc = ZERO;
            for l in 0..=m {
                acc += self.coeffs[l] * other.coeffs[m - l];
            }
            *out = acc;
        }
        Ok(Self {
            center: self.center,
            coeffs,
        })
    }

    /// Series quotient; requires a nonzero constant term in the divisor.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let b0 = other.coeffs[0];
        if b0 == ZERO {
            return Err(Error::VanishingConstant(other.center));
        }
        let n = self.common_len(other);
        let mut q = vec![ZERO; n];
        for m in 0..n {
            let mut acc = self.coeffs[m];
            for l in 1..=m {
                acc -= other.coeffs[l] * q[m - l];
            }
            q[m] = acc / b0;
        }
        Ok(Self {
            center: self.center,
            coeffs: q,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            center: self.center,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_scalar(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(self.center, ONE, self.order()).checked_div(self)
    }

    pub fn exp(&self) -> Self {
        let n = self.coeffs.len();
        let mut e = vec![ZERO; n];
        e[0] = self.coeffs[0].exp();
        for m in 1..n {
            let mut acc = ZERO;
            for l in 1..=m {
                acc += self.coeffs[l] * e[m - l] * (l as f64);
            }
            e[m] = acc / (m as f64);
        }
        Self {
            center: self.center,
            coeffs: e,
        }
    }

    /// Logarithm whose constant term is the principal value.
    pub fn ln(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0 == ZERO {
            return Err(Error::VanishingConstant(self.center));
        }
        Ok(self.ln_with_constant(c0.ln()))
    }

    /// Logarithm with a prescribed constant term `log_c0` (any branch of
    /// `log(c_0)`); the caller is responsible for `exp(log_c0) == c_0`.
    pub fn ln_with_constant(&self, log_c0: Complex64) -> Self {
        let a = &self.coeffs;
        let n = a.len();
        let mut l = vec![ZERO; n];
        l[0] = log_c0;
        for m in 1..n {
            let mut acc = a[m] * (m as f64);
            for j in 1..m {
                acc -= l[j] * a[m - j] * (j as f64);
            }
            l[m] = acc / (a[0] * (m as f64));
        }
        Self {
            center: self.center,
            coeffs: l,
        }
    }

    /// `self^beta` computed as `c * exp(beta * log(self / c_0))`.
    ///
    /// The constant term `c` is the principal value of `c_0^beta` unless
    /// `branch_ref` is given, in which case it is the value of `c_0^beta` on
    /// the sheet matching `branch_ref` (relative tolerance 1e-8).
    pub fn powc(&self, beta: Complex64, branch_ref: Option<Complex64>) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::VanishingConstant(self.center));
        }
        let log_a0 = a0.ln();
        let c = match branch_ref {
            None => (beta * log_a0).exp(),
            Some(reference) => select_branch(log_a0, beta, reference)?,
        };
        let normalized = self.scale(a0.inv());
        let log_part = normalized.ln_with_constant(ZERO);
        Ok(log_part.scale(beta).exp().scale(c))
    }

    pub fn powf(&self, beta: f64) -> Result<Self> {
        self.powc(Complex64::new(beta, 0.0), None)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::constant(self.center, ONE, self.order());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Jet of the `m`-th derivative, of order `N - m`.
    pub fn derivative(&self, m: usize) -> Result<Self> {
        let order = self.order();
        if m > order {
            return Err(Error::OrderExceeded {
                requested: m,
                available: order,
            });
        }
        let coeffs = (0..=order - m)
            .map(|j| {
                let ratio: f64 = ((j + 1)..=(j + m)).map(|i| i as f64).product();
                self.coeffs[j + m] * ratio
            })
            .collect();
        Ok(Self {
            center: self.center,
            coeffs,
        })
    }

    /// Evaluates the truncated series at `center + delta`.
    pub fn eval_offset(&self, delta: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(ZERO, |acc, c| acc * delta + c)
    }

    /// Re-expands the truncated series at `center + delta`, keeping `order`
    /// coefficients (at most the current order).
    pub fn recenter(&self, delta: Complex64, order: usize) -> Self {
        let n = self.coeffs.len();
        let keep = (order + 1).min(n);
        // Repeated synthetic division (Taylor shift) of the polynomial.
        let mut work = self.coeffs.clone();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = work[j + 1];
                work[j] += next * delta;
            }
        }
        work.truncate(keep);
        Self {
            center: self.center + delta,
            coeffs: work,
        }
    }

    /// Composition `outer ∘ inner`, expanded at `inner`'s center.
    /// Requires `outer.center == inner.value()`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        let base = inner.coeffs[0];
        if outer.center != base {
            return Err(Error::CenterMismatch(outer.center, base));
        }
        let n = outer.coeffs.len().min(inner.coeffs.len());
        let mut shift = inner.truncate(n - 1);
        shift.coeffs[0] = ZERO;
        // Horner in the shifted inner series.
        let mut acc = Self::constant(inner.center, outer.coeffs[n - 1], n - 1);
        for m in (0..n - 1).rev() {
            acc = (&acc * &shift).add_scalar(outer.coeffs[m]);
        }
        Ok(acc)
    }
}

fn select_branch(log_a0: Complex64, beta: Complex64, reference: Complex64) -> Result<Complex64> {
    let tol = BRANCH_TOL * reference.norm().max(f64::MIN_POSITIVE);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut best: Option<(f64, Complex64)> = None;
    for m in -BRANCH_SEARCH..=BRANCH_SEARCH {
        let cand = (beta * (log_a0 + two_pi_i * (m as f64))).exp();
        let dist = (cand - reference).norm();
        if best.map_or(true, |(d, _)| dist < d) {
            best = Some((dist, cand));
        }
    }
    match best {
        Some((d, cand)) if d <= tol => Ok(cand),
        _ => Err(Error::BranchMismatch { beta, reference }),
    }
}

impl fmt::Display for ComplexJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeffs[0])?;
        for (m, c) in self.coeffs.iter().enumerate().skip(1) {
            write!(f, " + ({})·(z-{})^{}", c, self.center, m)?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a ComplexJet> for &'a ComplexJet {
            type Output = ComplexJet;
            fn $method(self, rhs: &'a ComplexJet) -> ComplexJet {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("jet {}: {e}", stringify!($method)))
            }
        }
        impl $trait<ComplexJet> for ComplexJet {
            type Output = ComplexJet;
            fn $method(self, rhs: ComplexJet) -> ComplexJet {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &ComplexJet {
    type Output = ComplexJet;
    fn neg(self) -> ComplexJet {
        self.scale(-ONE)
    }
}

impl Neg for ComplexJet {
    type Output = ComplexJet;
    fn neg(self) -> ComplexJet {
        -&self
    }
}

pub fn jet_add(a: &ComplexJet, b: &ComplexJet) -> Result<ComplexJet> {
    a.checked_add(b)
}

pub fn jet_mul(a: &ComplexJet, b: &ComplexJet) -> Result<ComplexJet> {
    a.checked_mul(b)
}

pub fn jet_div(a: &ComplexJet, b: &ComplexJet) -> Result<ComplexJet> {
    a.checked_div(b)
}

pub fn jet_compose(outer: &ComplexJet, inner: &ComplexJet) -> Result<ComplexJet> {
    ComplexJet::compose(outer, inner)
}

pub fn jet_pow(
    a: &ComplexJet,
    beta: Complex64,
    branch_ref: Option<Complex64>,
) -> Result<ComplexJet> {
    a.powc(beta, branch_ref)
}

pub fn jet_derivative(a: &ComplexJet, m: usize) -> Result<ComplexJet> {
    a.derivative(m)
}
