//! Exact linear algebra over a field.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::rational::RationalFunc;

/// Minimal field interface for exact linear algebra.
pub trait Field: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// `rhs` must be nonzero.
    fn div(&self, rhs: &Self) -> Self;
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl Field for RationalFunc {
    fn zero() -> Self {
        RationalFunc::zero()
    }
    fn one() -> Self {
        RationalFunc::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunc::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// Solves `a x = b` by Gaussian elimination with first-nonzero pivoting.
/// Returns `None` when `a` is singular.
pub fn solve<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Option<Vec<F>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].div(&a[col][col]);
            let (top, rest) = a.split_at_mut(r);
            for (x, p) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = x.sub(&factor.mul(p));
            }
            let delta = factor.mul(&b[col]);
            b[r] = b[r].sub(&delta);
        }
    }
    let mut x = vec![F::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc.sub(&a[r][c].mul(&x[c]));
        }
        x[r] = acc.div(&a[r][r]);
    }
    Some(x)
}
