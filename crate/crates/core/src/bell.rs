//! Incomplete exponential Bell polynomials `B_{i,n}(z_1, ..., z_{i-n+1})`.
//!
//! Two independent evaluations are provided: the explicit sum over all index
//! sequences `(j_1, ..., j_{i-n+1})` with `Σ j_m = n` and `Σ m j_m = i`, and
//! the standard recurrence
//! `B_{i,n} = Σ_{m=1}^{i-n+1} C(i-1, m-1) z_m B_{i-m,n-1}`.
//! Both work over any [`BellRing`], which lets the same code run on exact
//! integers, complex numbers and jets.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::ComplexJet;

/// Largest `i` for which the integer coefficients are computed exactly.
pub const MAX_BELL_INDEX: usize = 20;

/// Commutative ring operations needed to evaluate Bell polynomials.
pub trait BellRing: Clone {
    fn ring_zero(like: &Self) -> Self;
    fn ring_one(like: &Self) -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_scale(&self, k: u128) -> Self;
}

impl BellRing for i128 {
    fn ring_zero(_: &Self) -> Self {
        0
    }
    fn ring_one(_: &Self) -> Self {
        1
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_scale(&self, k: u128) -> Self {
        self * k as i128
    }
}

impl BellRing for Complex64 {
    fn ring_zero(_: &Self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn ring_one(_: &Self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_scale(&self, k: u128) -> Self {
        self * k as f64
    }
}

impl BellRing for ComplexJet {
    fn ring_zero(like: &Self) -> Self {
        ComplexJet::constant(like.center(), Complex64::new(0.0, 0.0), like.order())
    }
    fn ring_one(like: &Self) -> Self {
        ComplexJet::constant(like.center(), Complex64::new(1.0, 0.0), like.order())
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_scale(&self, k: u128) -> Self {
        self.scale(Complex64::new(k as f64, 0.0))
    }
}

fn factorial(n: usize) -> u128 {
    (2..=n as u128).product()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn check_args<T>(i: usize, n: usize, z: &[T]) -> Result<()> {
    if i < n {
        return Err(Error::BellIndex(format!("i = {i} is smaller than n = {n}")));
    }
    if i > MAX_BELL_INDEX {
        return Err(Error::BellIndex(format!(
            "i = {i} exceeds the exact-arithmetic limit {MAX_BELL_INDEX}"
        )));
    }
    if z.len() != i - n + 1 {
        return Err(Error::BellIndex(format!(
            "B_{{{i},{n}}} takes {} arguments, got {}",
            i - n + 1,
            z.len()
        )));
    }
    Ok(())
}

/// Visits every `(j_1, ..., j_len)` with `Σ j_m = n` and `Σ m j_m = i`,
/// choosing `j_len` in the outermost loop and descending lexicographically.
fn for_each_partition(i: usize, n: usize, len: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(
        slot: usize,
        weight_left: usize,
        count_left: usize,
        js: &mut [usize],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if slot == 0 {
            if weight_left == 0 && count_left == 0 {
                visit(js);
            }
            return;
        }
        // j for part size `slot`; remaining parts are of size < slot.
        let max_j = (weight_left / slot).min(count_left);
        for j in 0..=max_j {
            js[slot - 1] = j;
            let w = weight_left - j * slot;
            let c = count_left - j;
            // remaining c parts have sizes in 1..slot
            if c <= w && w <= c * (slot - 1) {
                rec(slot - 1, w, c, js, visit);
            }
        }
        js[slot - 1] = 0;
    }
    let mut js = vec![0usize; len];
    rec(len, i, n, &mut js, visit);
}

/// Exact integer coefficient `i! / Π (j_m! (m!)^{j_m})` of one index sequence.
fn partition_coefficient(i: usize, js: &[usize]) -> u128 {
    let mut denom: u128 = 1;
    for (idx, &j) in js.iter().enumerate() {
        let m = idx + 1;
        denom *= factorial(j) * factorial(m).pow(j as u32);
    }
    factorial(i) / denom
}

/// `B_{i,n}` by explicit enumeration of the index sequences.
pub fn bell_polynomial_sum<T: BellRing>(i: usize, n: usize, z: &[T]) -> Result<T> {
    check_args(i, n, z)?;
    let like = &z[0];
    let mut total = T::ring_zero(like);
    for_each_partition(i, n, z.len(), &mut |js| {
        let mut term = T::ring_one(like).ring_scale(partition_coefficient(i, js));
        for (idx, &j) in js.iter().enumerate() {
            for _ in 0..j {
                term = term.ring_mul(&z[idx]);
            }
        }
        total = total.ring_add(&term);
    });
    Ok(total)
}

/// `B_{i,n}` by the recurrence on `(i, n)`.
pub fn bell_polynomial_recurrence<T: BellRing>(i: usize, n: usize, z: &[T]) -> Result<T> {
    check_args(i, n, z)?;
    let like = &z[0];
    // table[a][b] = B_{a,b}(z_1, ...), only entries with a - b + 1 <= len are needed
    let mut table: Vec<Vec<T>> = vec![vec![T::ring_zero(like); n + 1]; i + 1];
    table[0][0] = T::ring_one(like);
    for a in 1..=i {
        for b in 1..=n.min(a) {
            let mut acc = T::ring_zero(like);
            for m in 1..=(a - b + 1) {
                if m > z.len() {
                    break;
                }
                let prev = &table[a - m][b - 1];
                let term = z[m - 1].ring_mul(prev).ring_scale(binomial(a - 1, m - 1));
                acc = acc.ring_add(&term);
            }
            table[a][b] = acc;
        }
    }
    Ok(table[i][n].clone())
}

/// Complex-valued `B_{i,n}(z_1, ..., z_{i-n+1})` (explicit sum).
pub fn bell_polynomial(i: usize, n: usize, z: &[Complex64]) -> Result<Complex64> {
    bell_polynomial_sum(i, n, z)
}
