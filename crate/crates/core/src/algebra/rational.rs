//! Rational functions in `N`, kept in a canonical reduced form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

/// `num / den` with both sides ordinary polynomials in `N`, no common
/// factor (powers of `N` included) and a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (a, p) = num.to_poly();
        let (b, q) = den.to_poly();
        let g = p.gcd(&q);
        let (p, q) = if g.is_one() {
            (p, q)
        } else {
            (p.div_rem(&g).0, q.div_rem(&g).0)
        };
        let inv = q.lead().expect("nonzero denominator").recip();
        let (p, q) = (p.scale(&inv), q.scale(&inv));
        let e = a - b;
        let (ns, ds) = if e >= 0 { (e, 0) } else { (0, -e) };
        RationalFunc {
            num: LaurentPoly::from_poly(ns, p),
            den: LaurentPoly::from_poly(ds, q),
        }
    }

    pub fn zero() -> Self {
        RationalFunc {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_laurent(LaurentPoly::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_laurent(LaurentPoly::constant(c))
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        Self::canonical(p, LaurentPoly::one())
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Re-runs canonicalization (idempotent on canonical values).
    pub fn canonicalize(&self) -> Self {
        Self::canonical(self.num.clone(), self.den.clone())
    }

    /// The value as a Laurent polynomial when the denominator is a monomial.
    pub fn to_laurent(&self) -> Option<LaurentPoly> {
        if self.den.num_terms() != 1 {
            return None;
        }
        let (e, c) = self.den.leading_term().ok()?;
        Some(self.num.shift(-e).scale(&c.recip()))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Substitutes `N -> N^k` (k > 0).
    pub fn substitute_power(&self, k: i64) -> Self {
        Self::canonical(self.num.substitute_power(k), self.den.substitute_power(k))
    }

    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    /// Leading behaviour at large `N`: `(exponent, coefficient)`.
    pub fn leading_term(&self) -> Result<(i64, BigRational)> {
        let (en, cn) = self.num.leading_term()?;
        let (ed, cd) = self.den.leading_term()?;
        Ok((en - ed, cn / cd))
    }
}

impl From<LaurentPoly> for RationalFunc {
    fn from(p: LaurentPoly) -> Self {
        Self::from_laurent(p)
    }
}

impl Add<&RationalFunc> for &RationalFunc {
    type Output = RationalFunc;

    fn add(self, rhs: &RationalFunc) -> RationalFunc {
        if self.den == rhs.den {
            return RationalFunc::canonical(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunc::canonical(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub<&RationalFunc> for &RationalFunc {
    type Output = RationalFunc;

    fn sub(self, rhs: &RationalFunc) -> RationalFunc {
        self + &(-rhs)
    }
}

impl Mul<&RationalFunc> for &RationalFunc {
    type Output = RationalFunc;

    fn mul(self, rhs: &RationalFunc) -> RationalFunc {
        RationalFunc::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by zero; use [`RationalFunc::recip`] to handle it.
impl Div<&RationalFunc> for &RationalFunc {
    type Output = RationalFunc;

    fn div(self, rhs: &RationalFunc) -> RationalFunc {
        assert!(!rhs.is_zero(), "division by the zero rational function");
        RationalFunc::canonical(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunc {
    type Output = RationalFunc;

    fn neg(self) -> RationalFunc {
        RationalFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/({})", self.den)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRecord {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Serialize for RationalFunc {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRecord {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalFunc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = RationalRecord::deserialize(deserializer)?;
        RationalFunc::new(r.num, r.den).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::One;
    use proptest::prelude::*;

    fn int(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|&(e, c)| (e, int(c))))
    }

    #[test]
    fn canonical_form_examples() {
        // N^3 / (N^4 + N^2) = N / (N^2 + 1)
        let r = RationalFunc::new(lp(&[(3, 1)]), lp(&[(4, 1), (2, 1)])).unwrap();
        assert_eq!(r.numerator(), &lp(&[(1, 1)]));
        assert_eq!(r.denominator(), &lp(&[(2, 1), (0, 1)]));
        assert_eq!(r.to_string(), "N^1/(N^2 + 1)");

        // (2N^2 - 2) / (-4N - 4) = (-N/2 + 1/2)
        let s = RationalFunc::new(lp(&[(2, 2), (0, -2)]), lp(&[(1, -4), (0, -4)])).unwrap();
        assert_eq!(
            s.to_laurent().unwrap(),
            LaurentPoly::from_terms([(1, -int(1) / int(2)), (0, int(1) / int(2))])
        );

        // negative exponents are cleared: N^-2 / 1 = 1 / N^2
        let t = RationalFunc::from_laurent(lp(&[(-2, 3)]));
        assert_eq!(t.denominator(), &lp(&[(2, 1)]));
        assert_eq!(t.numerator(), &lp(&[(0, 3)]));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RationalFunc::new(LaurentPoly::one(), LaurentPoly::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn serde_round_trip() {
        let r = RationalFunc::new(lp(&[(1, 1)]), lp(&[(2, 1), (0, 1)])).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"num":[{"exp":1,"coeff":"1"}],"den":[{"exp":2,"coeff":"1"},{"exp":0,"coeff":"1"}]}"#
        );
        assert_eq!(serde_json::from_str::<RationalFunc>(&json).unwrap(), r);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-3i64..4, -5i64..6), 0..4).prop_map(|t| lp(&t))
    }

    fn arb_nonzero_poly() -> impl Strategy<Value = LaurentPoly> {
        arb_poly().prop_filter("nonzero", |p| !p.is_zero())
    }

    proptest! {
        #[test]
        fn canonicalization_idempotent_and_value_preserving(
            num in arb_poly(),
            den in arb_nonzero_poly(),
            common in arb_nonzero_poly(),
            points in prop::collection::vec((1i64..40, 1i64..7), 10),
        ) {
            // inflate with a common factor so that reduction has work to do
            let raw_num = &num * &common;
            let raw_den = &den * &common;
            let r = RationalFunc::new(raw_num.clone(), raw_den.clone()).unwrap();
            prop_assert_eq!(r.canonicalize(), r.clone());
            if !r.is_zero() {
                let (lead_exp, lead) = r.denominator().leading_term().unwrap();
                prop_assert!(lead.is_one());
                prop_assert!(r.denominator().min_exp().unwrap() >= 0 && lead_exp >= 0);
            }
            for (p, q) in points {
                let x = BigRational::new(p.into(), q.into());
                let d = raw_den.eval(&x);
                if d.is_zero() || r.denominator().eval(&x).is_zero() {
                    continue;
                }
                prop_assert_eq!(r.eval(&x).unwrap(), raw_num.eval(&x) / d);
            }
        }

        #[test]
        fn field_operations_match_evaluation(
            a in arb_poly(), b in arb_nonzero_poly(), c in arb_poly(), d in arb_nonzero_poly(),
            x in 2i64..30,
        ) {
            let r = RationalFunc::new(a, b).unwrap();
            let s = RationalFunc::new(c, d).unwrap();
            let x = BigRational::new(x.into(), 3.into());
            let (Ok(rv), Ok(sv)) = (r.eval(&x), s.eval(&x)) else { return Ok(()); };
            prop_assert_eq!((&r + &s).eval(&x).unwrap(), &rv + &sv);
            prop_assert_eq!((&r * &s).eval(&x).unwrap(), &rv * &sv);
            prop_assert_eq!((&r - &s).eval(&x).unwrap(), &rv - &sv);
        }
    }
}
