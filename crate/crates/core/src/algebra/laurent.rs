//! Laurent polynomials in the single symbol `N` with exact rational
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    // exponent -> coefficient, never storing zero coefficients
    terms: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The symbol `N`.
    pub fn n() -> Self {
        Self::monomial(1, BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_integer(c: impl Into<BigInt>) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn monomial(exp: i64, coeff: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    /// `N^exp` with coefficient one.
    pub fn power(exp: i64) -> Self {
        Self::monomial(exp, BigRational::one())
    }

    /// Builds from `(exponent, coefficient)` pairs, summing repeated exponents.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigRational)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Integer exponent histogram `exp -> count` as a polynomial.
    pub fn from_histogram<'a>(hist: impl IntoIterator<Item = (&'a i64, &'a u64)>) -> Self {
        Self::from_terms(
            hist.into_iter()
                .map(|(&e, &c)| (e, BigRational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(One::is_one)
    }

    /// Terms in descending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.terms.iter().rev().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        self.terms
            .get(&exp)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Term of maximal exponent.
    pub fn leading_term(&self) -> Result<(i64, BigRational)> {
        self.terms
            .iter()
            .next_back()
            .map(|(&e, c)| (e, c.clone()))
            .ok_or(Error::ZeroPolynomial)
    }

    /// Multiplies by `N^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, a)| (e, a * c)).collect(),
        }
    }

    /// Substitutes `N -> N^k` (k > 0).
    pub fn substitute_power(&self, k: i64) -> Self {
        assert!(k > 0, "substitution exponent must be positive");
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e * k, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Exact value at a rational point (must be nonzero if negative
    /// exponents are present).
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&e, c) in &self.terms {
            let xe = if e >= 0 {
                num_traits::pow(x.clone(), e as usize)
            } else {
                num_traits::pow(x.recip(), (-e) as usize)
            };
            acc += c * xe;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(&e, c)| c.to_f64().unwrap_or(f64::NAN) * x.powi(e as i32))
            .sum()
    }

    /// True when every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Splits into `N^shift * p(N)` with `p` an ordinary polynomial and
    /// `p(0) != 0`. The zero polynomial maps to `(0, 0)`.
    pub(crate) fn to_poly(&self) -> (i64, Poly) {
        let Some(lo) = self.min_exp() else {
            return (0, Poly::zero());
        };
        let hi = self.max_exp().unwrap();
        let mut coeffs = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (&e, c) in &self.terms {
            coeffs[(e - lo) as usize] = c.clone();
        }
        (lo, Poly::new(coeffs))
    }

    pub(crate) fn from_poly(shift: i64, p: Poly) -> Self {
        LaurentPoly {
            terms: p
                .into_coeffs()
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (shift + i as i64, c))
                .collect(),
        }
    }

    /// Serializable `(exp, coeff)` records in descending exponent order.
    pub fn records(&self) -> Vec<TermRecord> {
        self.terms()
            .map(|(exp, c)| TermRecord {
                exp,
                coeff: format_rational(c),
            })
            .collect()
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;

    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, c.clone());
        }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if e == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "N^{e}")?;
            } else {
                write!(f, "{a}*N^{e}")?;
            }
        }
        Ok(())
    }
}

/// Serialized form of one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exp: i64,
    pub coeff: String,
}

/// `p/q` (or `p` for integers), never a decimal.
pub fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        let mut p = LaurentPoly::zero();
        for r in records {
            p.add_term(r.exp, parse_rational(&r.coeff).map_err(D::Error::custom)?);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|&(e, c)| (e, int(c))))
    }

    #[test]
    fn leading_term_examples() {
        assert_eq!(lp(&[(7, 1), (5, 1)]).leading_term().unwrap(), (7, int(1)));
        assert_eq!(lp(&[(3, 2), (1, -1)]).leading_term().unwrap(), (3, int(2)));
        assert_eq!(lp(&[(0, 5)]).leading_term().unwrap(), (0, int(5)));
        assert_eq!(
            LaurentPoly::zero().leading_term(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn display_and_serialization() {
        let p = lp(&[(3, 1), (1, 1)]);
        assert_eq!(p.to_string(), "N^3 + N^1");
        let q = LaurentPoly::from_terms([
            (2, int(-2)),
            (0, int(1)),
            (-1, BigRational::new(1.into(), 2.into())),
        ]);
        assert_eq!(q.to_string(), "-2*N^2 + 1 + 1/2*N^-1");
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(
            json,
            r#"[{"exp":2,"coeff":"-2"},{"exp":0,"coeff":"1"},{"exp":-1,"coeff":"1/2"}]"#
        );
        let back: LaurentPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = lp(&[(2, 1), (1, 3)]);
        let d = &p - &p;
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-4i64..5, -6i64..7), 0..5).prop_map(|t| lp(&t))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            let sum = &a + &b;
            prop_assert!(sum.terms().all(|(_, c)| !c.is_zero()));
            let prod = &a * &b;
            prop_assert!(prod.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn eval_is_a_ring_homomorphism(a in arb_poly(), b in arb_poly(), x in 1i64..9) {
            let x = int(x);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
        }
    }
}
