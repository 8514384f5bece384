//! Exact Gaussian expectations by enumerating Wick contractions.
//!
//! With unit covariance `⟨T_a T̄_b⟩ = δ_{ab}`, a Wick pairing `π ∈ S_n`
//! matches white `i` with black `π(i)` and contributes
//! `∏_c N^{#cycles(τ_c ∘ π⁻¹)}`: one factor of `N` per closed index loop of
//! each color.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{
    count_cycles_of_product, factorial, for_each_with_first, format_rational, LaurentPoly,
};
use crate::bubble::Bubble;
use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub n_max: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_max: DEFAULT_N_MAX,
        }
    }
}

impl OracleConfig {
    fn check(&self, b: &Bubble) -> Result<()> {
        let n = b.n();
        if n > self.n_max {
            return Err(Error::TooLarge {
                what: "Wick enumeration",
                n,
                n_max: self.n_max,
                estimated_ops: factorial(n) as f64 * (n * b.d()) as f64,
            });
        }
        Ok(())
    }
}

/// Calls `f(first, cycle counts per color)` for every pairing, split over
/// the image of white 0 so each range can run on its own worker. Partial
/// results come back in range order.
fn enumerate<T: Send>(
    b: &Bubble,
    init: impl Fn() -> T + Sync,
    step: impl Fn(&mut T, &[usize]) + Sync,
) -> Vec<T> {
    let n = b.n();
    let inverses: Vec<Vec<usize>> = b
        .color_maps()
        .iter()
        .map(|t| t.inverse().images().to_vec())
        .collect();
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut cycles = vec![0usize; inverses.len()];
            for_each_with_first(n, first, |pi| {
                // #cycles(τ π⁻¹) = #cycles(π τ⁻¹)
                for (slot, inv) in cycles.iter_mut().zip(&inverses) {
                    *slot = count_cycles_of_product(pi, inv);
                }
                step(&mut acc, &cycles);
            });
            acc
        })
        .collect()
}

/// `Σ_π N^{Σ_c #cycles(τ_c π⁻¹)}` at unit covariance.
pub fn gaussian_expectation(b: &Bubble) -> Result<LaurentPoly> {
    gaussian_expectation_with(b, &OracleConfig::default())
}

pub fn gaussian_expectation_with(b: &Bubble, config: &OracleConfig) -> Result<LaurentPoly> {
    config.check(b)?;
    let width = b.n() * b.d() + 1;
    let parts = enumerate(
        b,
        || vec![0u64; width],
        |hist, cycles| hist[cycles.iter().sum::<usize>()] += 1,
    );
    let mut total = vec![0u64; width];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    let hist: BTreeMap<i64, u64> = total
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(e, c)| (e as i64, c))
        .collect();
    Ok(LaurentPoly::from_histogram(&hist))
}

/// Leading exponent and the number of pairings attaining it.
pub fn dominant_contractions(b: &Bubble) -> Result<(i64, BigUint)> {
    let (exp, coeff) = gaussian_expectation(b)?.leading_term()?;
    let count = coeff
        .to_integer()
        .to_biguint()
        .expect("pairing counts are positive");
    Ok((exp, count))
}

/// The Wick sum with one numeric dimension per color:
/// `Σ_π ∏_c N_c^{#cycles(τ_c π⁻¹)}`.
pub fn per_color_dimensions(b: &Bubble, dims: &[u64]) -> Result<BigUint> {
    per_color_dimensions_with(b, dims, &OracleConfig::default())
}

pub fn per_color_dimensions_with(
    b: &Bubble,
    dims: &[u64],
    config: &OracleConfig,
) -> Result<BigUint> {
    if dims.len() != b.d() {
        return Err(Error::DimensionMismatch(format!(
            "{} dimensions given for a bubble with {} colors",
            dims.len(),
            b.d()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::DimensionMismatch(
            "dimensions must be positive".into(),
        ));
    }
    config.check(b)?;
    let parts = enumerate(b, BTreeMap::<Vec<usize>, u64>::new, |hist, cycles| {
        *hist.entry(cycles.to_vec()).or_default() += 1
    });
    let mut merged: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for part in parts {
        for (k, v) in part {
            *merged.entry(k).or_default() += v;
        }
    }
    Ok(merged
        .into_iter()
        .map(|(cycles, count)| {
            cycles
                .iter()
                .zip(dims)
                .fold(BigUint::from(count), |acc, (&k, &n)| {
                    acc * BigUint::from(n).pow(k as u32)
                })
        })
        .sum())
}

/// Expectation at unit covariance and after rescaling the covariance to
/// `N^{-α}`, i.e. multiplying by `N^{-αn}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectationResult {
    pub raw: LaurentPoly,
    pub alpha: i64,
    pub scaled: LaurentPoly,
}

impl ExpectationResult {
    pub fn new(raw: LaurentPoly, alpha: i64, n: usize) -> Self {
        let scaled = raw.shift(-alpha * n as i64);
        ExpectationResult { raw, alpha, scaled }
    }

    pub fn leading(&self) -> Option<(i64, BigRational)> {
        self.scaled.leading_term().ok()
    }
}

pub fn expectation(b: &Bubble, alpha: i64) -> Result<ExpectationResult> {
    Ok(ExpectationResult::new(
        gaussian_expectation(b)?,
        alpha,
        b.n(),
    ))
}

#[derive(Serialize)]
struct LeadingRecord {
    exp: i64,
    coeff: String,
}

impl Serialize for ExpectationResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExpectationResult", 4)?;
        s.serialize_field("raw", &self.raw)?;
        s.serialize_field("alpha", &self.alpha)?;
        s.serialize_field("scaled", &self.scaled)?;
        let (exp, coeff) = self.leading().unwrap_or((0, BigRational::zero()));
        s.serialize_field(
            "leading",
            &LeadingRecord {
                exp,
                coeff: format_rational(&coeff),
            },
        )?;
        s.end()
    }
}

/// `n!`, the number of Wick pairings, as a big integer.
pub fn pairing_count(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalan, Permutation};
    use crate::bubble::{dipole, necklace, partial_trace_pair, ColorSplit};
    use crate::tree::{enumerate_trees, CornerLabeledTree};

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(
            terms
                .iter()
                .map(|&(e, c)| (e, BigRational::from_integer(c.into()))),
        )
    }

    fn split24() -> ColorSplit {
        ColorSplit::new(4, [2, 4]).unwrap()
    }

    fn suite() -> Vec<Bubble> {
        let mut out = vec![dipole(4).unwrap(), dipole(3).unwrap()];
        for (k, l) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            out.push(partial_trace_pair(k, l).unwrap());
        }
        for k in 1..=4 {
            out.push(necklace(&split24(), k).unwrap());
            out.push(necklace(&ColorSplit::new(4, [1]).unwrap(), k).unwrap());
        }
        out.push(
            Bubble::new(vec![
                Permutation::rotation(3, 1),
                Permutation::transposition(3, 0, 2),
                Permutation::identity(3),
            ])
            .unwrap(),
        );
        out
    }

    #[test]
    fn dipole_and_pair() {
        assert_eq!(
            gaussian_expectation(&dipole(4).unwrap()).unwrap(),
            lp(&[(4, 1)])
        );
        let pair = partial_trace_pair(1, 1).unwrap();
        assert_eq!(gaussian_expectation(&pair).unwrap(), lp(&[(7, 1), (5, 1)]));
        let r = expectation(&pair, 2).unwrap();
        assert_eq!(r.scaled, lp(&[(3, 1), (1, 1)]));
        assert_eq!(r.leading(), Some((3, BigRational::one())));
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"raw":[{"exp":7,"coeff":"1"},{"exp":5,"coeff":"1"}],"alpha":2,"scaled":[{"exp":3,"coeff":"1"},{"exp":1,"coeff":"1"}],"leading":{"exp":3,"coeff":"1"}}"#
        );
    }

    #[test]
    fn dominant_counts() {
        assert_eq!(
            dominant_contractions(&dipole(4).unwrap()).unwrap(),
            (4, BigUint::from(1u32))
        );
        let t = CornerLabeledTree::new(1, vec![2, 0], vec![CornerLabeledTree::leaf(1, 1)]);
        assert_eq!(
            dominant_contractions(&t.to_bubble().unwrap()).unwrap().1,
            BigUint::from(2u32)
        );
        // at the square split both non-crossing pairings of tr(MM†)^2 dominate
        assert_eq!(
            dominant_contractions(&necklace(&split24(), 2).unwrap()).unwrap(),
            (6, BigUint::from(2u32))
        );
        // at an unbalanced split a single pairing survives
        let unbalanced = necklace(&ColorSplit::new(4, [1]).unwrap(), 3).unwrap();
        assert_eq!(
            dominant_contractions(&unbalanced).unwrap().1,
            BigUint::from(1u32)
        );
    }

    #[test]
    fn numeric_dimensions() {
        assert_eq!(
            per_color_dimensions(&dipole(4).unwrap(), &[2, 3, 4, 5]).unwrap(),
            BigUint::from(120u32)
        );
        let pair = partial_trace_pair(1, 1).unwrap();
        assert_eq!(
            per_color_dimensions(&pair, &[2; 4]).unwrap(),
            BigUint::from(160u32)
        );
        for b in suite() {
            assert_eq!(
                per_color_dimensions(&b, &vec![1; b.d()]).unwrap(),
                pairing_count(b.n())
            );
        }
        assert!(per_color_dimensions(&pair, &[2, 2]).is_err());
    }

    #[test]
    fn specialization_consistency() {
        for b in suite() {
            let p = gaussian_expectation(&b).unwrap();
            for n0 in [2u64, 3, 5] {
                let v = per_color_dimensions(&b, &vec![n0; b.d()]).unwrap();
                assert_eq!(
                    p.eval(&BigRational::from_integer(n0.into())),
                    BigRational::from_integer(v.into())
                );
            }
        }
    }

    #[test]
    fn positivity() {
        for b in suite() {
            let p = gaussian_expectation(&b).unwrap();
            assert!(p.terms().all(|(_, c)| c > &BigRational::zero()));
            assert_eq!(
                p.eval(&BigRational::one()),
                BigRational::from_integer(pairing_count(b.n()).into())
            );
        }
    }

    #[test]
    fn leading_coefficient_is_catalan_product_on_small_trees() {
        for t in enumerate_trees(2, 4) {
            let (_, count) = dominant_contractions(&t.to_bubble().unwrap()).unwrap();
            assert_eq!(count, t.catalan_product(), "{t:?}");
        }
        assert_eq!(catalan(2), BigUint::from(2u32));
    }

    #[test]
    fn refuses_large_bubbles() {
        let big = necklace(&split24(), 10).unwrap();
        match gaussian_expectation(&big) {
            Err(Error::TooLarge {
                n: 10,
                n_max: 9,
                estimated_ops,
                ..
            }) => assert!(estimated_ops > 1e7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let b = partial_trace_pair(4, 3).unwrap();
        let results: Vec<_> = [1, 2, 8]
            .into_iter()
            .map(|threads| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap()
                    .install(|| {
                        (
                            serde_json::to_string(&gaussian_expectation(&b).unwrap()).unwrap(),
                            per_color_dimensions(&b, &[2, 3, 4, 5]).unwrap(),
                        )
                    })
            })
            .collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }
}
