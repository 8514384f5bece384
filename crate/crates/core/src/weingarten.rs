//! Unitary Weingarten functions, exact and asymptotic.
//!
//! `Wg_D` is the class function on `S_n` inverse to `D^{#cycles}` under
//! convolution: `Σ_τ Wg_D(σ τ⁻¹) D^{#cycles(τ)} = δ_{σ,id}`. Restricted to
//! class functions this becomes a `p(n) × p(n)` linear system, solved here
//! over exact rational functions of `D` or exact rationals for numeric `D`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::algebra::{
    catalan, count_cycles_of_product, factorial, format_rational, partitions, permutations, solve,
    LaurentPoly, Partition, RationalFunc,
};
use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 8;

/// Dimension of the unitary group: a power of the symbol `N` or a number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    /// `N^k` with `k >= 1`.
    Power(u32),
    Numeric(u64),
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Power(1) => write!(f, "N"),
            Dim::Power(k) => write!(f, "N^{k}"),
            Dim::Numeric(m) => write!(f, "{m}"),
        }
    }
}

/// Accepts `"symbolic"` or `"N"` (= `N^1`), `"N^k"`, or a positive integer.
impl FromStr for Dim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("symbolic") || s == "N" {
            return Ok(Dim::Power(1));
        }
        if let Some(k) = s.strip_prefix("N^") {
            return match k.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(Dim::Power(k)),
                _ => Err(Error::Parse(format!("bad dimension power in {s:?}"))),
            };
        }
        match s.parse::<u64>() {
            Ok(m) if m >= 1 => Ok(Dim::Numeric(m)),
            _ => Err(Error::Parse(format!(
                "dimension must be 'symbolic', 'N^k' or a positive integer, got {s:?}"
            ))),
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeingartenConfig {
    pub n_max: usize,
}

impl Default for WeingartenConfig {
    fn default() -> Self {
        WeingartenConfig {
            n_max: DEFAULT_N_MAX,
        }
    }
}

impl WeingartenConfig {
    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            let classes = partitions(n).len() as f64;
            return Err(Error::TooLarge {
                what: "Weingarten table",
                n,
                n_max: self.n_max,
                estimated_ops: factorial(n) as f64 * classes + classes.powi(3),
            });
        }
        Ok(())
    }
}

/// The conjugacy classes of `S_n`, i.e. the partitions of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyClassTable {
    pub n: usize,
    pub classes: Vec<Partition>,
    #[serde(serialize_with = "decimal_strings")]
    pub class_sizes: Vec<BigUint>,
    #[serde(skip)]
    index: HashMap<Partition, usize>,
}

fn decimal_strings<S: Serializer>(
    xs: &[BigUint],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(xs.iter().map(|x| x.to_string()))
}

impl ConjugacyClassTable {
    pub fn new(n: usize) -> Self {
        let classes = partitions(n);
        let class_sizes = classes.iter().map(Partition::class_size).collect();
        let index = classes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        ConjugacyClassTable {
            n,
            classes,
            class_sizes,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, class: &Partition) -> Option<usize> {
        self.index.get(class).copied()
    }

    /// Index of the class `(1^n)` of the identity.
    pub fn identity_index(&self) -> usize {
        self.classes.len() - 1
    }
}

/// `counts[a][b][k]`: number of `τ` of class `b` with `#cycles(σ_a τ⁻¹) = k`
/// for the fixed representative `σ_a` of class `a`.
struct GramCounts {
    table: ConjugacyClassTable,
    counts: Vec<Vec<Vec<u64>>>,
}

impl GramCounts {
    fn compute(n: usize) -> Self {
        let table = ConjugacyClassTable::new(n);
        let reps: Vec<Vec<usize>> = table
            .classes
            .iter()
            .map(Partition::representative)
            .collect();
        let mut counts = vec![vec![vec![0u64; n + 1]; table.len()]; table.len()];
        for tau in permutations(n) {
            let b = table
                .index_of(&tau.cycle_type())
                .expect("every cycle type is a class");
            let inv = tau.inverse();
            for (a, rep) in reps.iter().enumerate() {
                counts[a][b][count_cycles_of_product(rep, inv.images())] += 1;
            }
        }
        GramCounts { table, counts }
    }

    fn symbolic(&self) -> Vec<Vec<LaurentPoly>> {
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|hist| {
                        let mut p = LaurentPoly::zero();
                        for (k, &c) in hist.iter().enumerate().filter(|(_, &c)| c > 0) {
                            p.add_term(k as i64, BigRational::from_integer(c.into()));
                        }
                        p
                    })
                    .collect()
            })
            .collect()
    }

    fn numeric(&self, m: u64) -> Vec<Vec<BigRational>> {
        let m = BigInt::from(m);
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|hist| {
                        let mut acc = BigInt::zero();
                        let mut pow = BigInt::one();
                        for &c in hist {
                            acc += &pow * c;
                            pow *= &m;
                        }
                        BigRational::from_integer(acc)
                    })
                    .collect()
            })
            .collect()
    }
}

fn gram_counts(n: usize) -> Arc<GramCounts> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GramCounts>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().expect("cache lock").get(&n) {
        return g.clone();
    }
    let g = Arc::new(GramCounts::compute(n));
    cache
        .lock()
        .expect("cache lock")
        .entry(n)
        .or_insert(g)
        .clone()
}

/// Class Gram matrix with entries as polynomials in the dimension `D`
/// (written as the symbol `N`): entry `(a, b)` is
/// `Σ_{τ ∈ b} D^{#cycles(σ_a τ⁻¹)}`, classes ordered as [`partitions`].
pub fn gram_matrix(n: usize) -> Vec<Vec<LaurentPoly>> {
    gram_counts(n).symbolic()
}

pub fn gram_matrix_numeric(n: usize, dim: u64) -> Vec<Vec<BigRational>> {
    gram_counts(n).numeric(dim)
}

/// Weingarten values at `D = N` for every class of `S_n`, in class order.
fn base_symbolic(n: usize) -> Result<Arc<Vec<RationalFunc>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<RationalFunc>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache lock").get(&n) {
        return Ok(v.clone());
    }
    let w = match interpolate_symbolic(n)? {
        Some(w) => w,
        None => eliminate_symbolic(n)?,
    };
    let w = Arc::new(w);
    Ok(cache
        .lock()
        .expect("cache lock")
        .entry(n)
        .or_insert(w)
        .clone())
}

/// Gaussian elimination directly over rational functions. Exact but slow
/// beyond `n = 6`.
fn eliminate_symbolic(n: usize) -> Result<Vec<RationalFunc>> {
    let g = gram_counts(n);
    let a: Vec<Vec<RationalFunc>> = g
        .symbolic()
        .into_iter()
        .map(|row| row.into_iter().map(RationalFunc::from_laurent).collect())
        .collect();
    let mut rhs = vec![RationalFunc::zero(); a.len()];
    rhs[g.table.identity_index()] = RationalFunc::one();
    solve(a, rhs).ok_or(Error::DivisionByZero)
}

/// `∏_c (D + c)^{e_c}` where `e_c` is the largest number of boxes of
/// content `c` in a Young diagram with `n` boxes. The class Gram matrix acts
/// on each isotypic component by a content polynomial `∏_{boxes} (D + c)`,
/// so this is a common denominator of all Weingarten values.
fn content_denominator(n: usize) -> LaurentPoly {
    let mut e: HashMap<i64, u32> = HashMap::new();
    for lambda in partitions(n) {
        let mut counts: HashMap<i64, u32> = HashMap::new();
        for (i, &row) in lambda.parts().iter().enumerate() {
            for j in 0..row {
                *counts.entry(j as i64 - i as i64).or_default() += 1;
            }
        }
        for (c, k) in counts {
            let slot = e.entry(c).or_default();
            *slot = (*slot).max(k);
        }
    }
    e.into_iter().fold(LaurentPoly::one(), |acc, (c, k)| {
        let factor = &LaurentPoly::n() + &LaurentPoly::from_integer(c);
        &acc * &factor.pow(k)
    })
}

/// Newton interpolation through `(x_i, y_i)` with distinct `x_i`.
fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> LaurentPoly {
    let mut coef = ys.to_vec();
    for j in 1..xs.len() {
        for i in (j..xs.len()).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = LaurentPoly::zero();
    for i in (0..xs.len()).rev() {
        let shifted = &p * &(&LaurentPoly::n() - &LaurentPoly::constant(xs[i].clone()));
        p = &shifted + &LaurentPoly::constant(coef[i].clone());
    }
    p
}

/// Exact symbolic values from exact numeric solves: `Wg · Q` is a
/// polynomial of degree at most `deg Q − n`, recovered by interpolation at
/// integer dimensions and confirmed at further points. Returns `None` if
/// confirmation fails.
fn interpolate_symbolic(n: usize) -> Result<Option<Vec<RationalFunc>>> {
    let q = content_denominator(n);
    let deg = q.max_exp().unwrap_or(0) - n as i64;
    let points = (deg.max(0) + 1) as u64;
    let config = WeingartenConfig { n_max: usize::MAX };
    let dims: Vec<u64> = (0..points + 3).map(|i| n as u64 + i).collect();
    let values = dims
        .iter()
        .map(|&m| weingarten_class_values_numeric(n, m, &config))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<BigRational> = dims
        .iter()
        .map(|&m| BigRational::from_integer(m.into()))
        .collect();
    let qs: Vec<BigRational> = xs.iter().map(|x| q.eval(x)).collect();
    let fit = points as usize;
    let mut out = Vec::new();
    for b in 0..values[0].len() {
        let ys: Vec<BigRational> = values[..fit]
            .iter()
            .zip(&qs)
            .map(|(v, q)| &v[b] * q)
            .collect();
        let w = RationalFunc::new(interpolate(&xs[..fit], &ys), q.clone())?;
        for (x, v) in xs[fit..].iter().zip(&values[fit..]) {
            if w.eval(x)? != v[b] {
                return Ok(None);
            }
        }
        out.push(w);
    }
    Ok(Some(out))
}

/// Symbolic Weingarten values at `D = N^power`, in class order.
pub fn weingarten_class_values(
    n: usize,
    power: u32,
    config: &WeingartenConfig,
) -> Result<Vec<RationalFunc>> {
    config.check(n)?;
    if power == 0 {
        return Err(Error::Parse("dimension power must be at least 1".into()));
    }
    let base = base_symbolic(n)?;
    Ok(base
        .iter()
        .map(|w| w.substitute_power(power as i64))
        .collect())
}

/// Numeric Weingarten values in class order, from an independent exact
/// solve of the numerically evaluated Gram system.
pub fn weingarten_class_values_numeric(
    n: usize,
    dim: u64,
    config: &WeingartenConfig,
) -> Result<Vec<BigRational>> {
    config.check(n)?;
    if dim < n as u64 {
        return Err(Error::SingularDimension { dim, n });
    }
    let g = gram_counts(n);
    let mut rhs = vec![BigRational::zero(); g.table.len()];
    rhs[g.table.identity_index()] = BigRational::one();
    solve(g.numeric(dim), rhs).ok_or(Error::SingularDimension { dim, n })
}

/// A Weingarten value, symbolic or numeric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WgValue {
    Symbolic(RationalFunc),
    Numeric(BigRational),
}

impl WgValue {
    pub fn as_symbolic(&self) -> Option<&RationalFunc> {
        match self {
            WgValue::Symbolic(r) => Some(r),
            WgValue::Numeric(_) => None,
        }
    }

    pub fn as_numeric(&self) -> Option<&BigRational> {
        match self {
            WgValue::Numeric(q) => Some(q),
            WgValue::Symbolic(_) => None,
        }
    }
}

impl fmt::Display for WgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WgValue::Symbolic(r) => write!(f, "{r}"),
            WgValue::Numeric(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

impl Serialize for WgValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WgValue::Symbolic(r) => r.serialize(serializer),
            WgValue::Numeric(q) => serializer.serialize_str(&format_rational(q)),
        }
    }
}

pub fn weingarten_exact(class: &Partition, dim: Dim) -> Result<WgValue> {
    weingarten_exact_with(class, dim, &WeingartenConfig::default())
}

pub fn weingarten_exact_with(
    class: &Partition,
    dim: Dim,
    config: &WeingartenConfig,
) -> Result<WgValue> {
    let n = class.size();
    if n == 0 {
        return Err(Error::Parse(
            "the empty partition has no Weingarten value".into(),
        ));
    }
    let table = ConjugacyClassTable::new(n);
    let idx = table
        .index_of(class)
        .expect("a partition of n is a class of S_n");
    Ok(match dim {
        Dim::Power(k) => WgValue::Symbolic(weingarten_class_values(n, k, config)?.swap_remove(idx)),
        Dim::Numeric(m) => {
            WgValue::Numeric(weingarten_class_values_numeric(n, m, config)?.swap_remove(idx))
        }
    })
}

/// Leading large-`D` behaviour `coeff · D^exp` of `Wg_D` on a class with
/// `p_j` cycles of length `j`: `exp = Σ p_j − 2n`,
/// `coeff = ∏_j ((−1)^{j−1} Cat_{j−1})^{p_j}`.
pub fn weingarten_asymptotic(class: &Partition) -> (i64, BigInt) {
    let exp = class.len() as i64 - 2 * class.size() as i64;
    let coeff = class.parts().iter().fold(BigInt::one(), |acc, &j| {
        let c = BigInt::from(catalan(j as u32 - 1));
        if j % 2 == 0 {
            -acc * c
        } else {
            acc * c
        }
    });
    (exp, coeff)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeingartenEntry {
    pub class: Partition,
    pub value: WgValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeingartenTable {
    pub n: usize,
    pub dim: Dim,
    pub values: Vec<WeingartenEntry>,
}

impl WeingartenTable {
    pub fn new(n: usize, dim: Dim) -> Result<Self> {
        Self::with_config(n, dim, &WeingartenConfig::default())
    }

    pub fn with_config(n: usize, dim: Dim, config: &WeingartenConfig) -> Result<Self> {
        let table = ConjugacyClassTable::new(n);
        let values: Vec<WgValue> = match dim {
            Dim::Power(k) => weingarten_class_values(n, k, config)?
                .into_iter()
                .map(WgValue::Symbolic)
                .collect(),
            Dim::Numeric(m) => weingarten_class_values_numeric(n, m, config)?
                .into_iter()
                .map(WgValue::Numeric)
                .collect(),
        };
        Ok(WeingartenTable {
            n,
            dim,
            values: table
                .classes
                .into_iter()
                .zip(values)
                .map(|(class, value)| WeingartenEntry { class, value })
                .collect(),
        })
    }

    pub fn get(&self, class: &Partition) -> Option<&WgValue> {
        self.values
            .iter()
            .find(|e| &e.class == class)
            .map(|e| &e.value)
    }
}

/// Full `n! × n!` product `G · W` with `G[σ][ρ] = D^{#cycles(σρ⁻¹)}` and
/// `W[ρ][τ] = Wg_D(ρτ⁻¹)`, rows and columns in lexicographic order.
/// Equals the identity matrix by the defining property of `Wg`.
pub fn gram_weingarten_product(n: usize, dim: u64) -> Result<Vec<Vec<BigRational>>> {
    let values = weingarten_class_values_numeric(n, dim, &WeingartenConfig::default())?;
    let table = ConjugacyClassTable::new(n);
    let perms: Vec<_> = permutations(n).collect();
    let invs: Vec<_> = perms.iter().map(|p| p.inverse()).collect();
    let d = BigRational::from_integer(dim.into());
    let powers: Vec<BigRational> = (0..=n as i32)
        .map(|k| num_traits::pow(d.clone(), k as usize))
        .collect();
    let size = perms.len();
    let gram: Vec<Vec<usize>> = (0..size)
        .map(|s| {
            (0..size)
                .map(|r| count_cycles_of_product(perms[s].images(), invs[r].images()))
                .collect()
        })
        .collect();
    let wg: Vec<Vec<usize>> = (0..size)
        .map(|r| {
            (0..size)
                .map(|t| {
                    let prod = perms[r].compose(&invs[t]).expect("equal lengths");
                    table.index_of(&prod.cycle_type()).expect("class")
                })
                .collect()
        })
        .collect();
    Ok((0..size)
        .map(|s| {
            (0..size)
                .map(|t| {
                    (0..size).fold(BigRational::zero(), |acc, r| {
                        acc + &powers[gram[s][r]] * &values[wg[r][t]]
                    })
                })
                .collect()
        })
        .collect())
}

/// Exact ratio of `Wg_m` to its leading monomial on `class`.
pub fn asymptotic_ratio(class: &Partition, m: u64) -> Result<BigRational> {
    let WgValue::Numeric(v) = weingarten_exact(class, Dim::Numeric(m))? else {
        unreachable!("numeric dimension yields a numeric value")
    };
    let (exp, coeff) = weingarten_asymptotic(class);
    let mono = BigRational::from_integer(coeff)
        * BigRational::from_integer(BigInt::from(m)).pow(exp as i32);
    Ok(v / mono)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Permutation;
    use num_traits::Signed;

    fn int(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|&(e, c)| (e, int(c))))
    }

    fn sym(class: &[usize], k: u32) -> RationalFunc {
        weingarten_exact(&Partition::from_parts(class.to_vec()), Dim::Power(k))
            .unwrap()
            .as_symbolic()
            .unwrap()
            .clone()
    }

    #[test]
    fn gram_small() {
        assert_eq!(gram_matrix(1), vec![vec![lp(&[(1, 1)])]]);
        // classes (2), (1,1)
        let g = gram_matrix(2);
        assert_eq!(g[0][0], lp(&[(2, 1)]));
        assert_eq!(g[0][1], lp(&[(1, 1)]));
        assert_eq!(g[1][0], lp(&[(1, 1)]));
        assert_eq!(g[1][1], lp(&[(2, 1)]));
    }

    #[test]
    fn small_values() {
        assert_eq!(
            sym(&[1], 1),
            RationalFunc::new(lp(&[(0, 1)]), lp(&[(1, 1)])).unwrap()
        );
        assert_eq!(
            sym(&[1, 1], 1),
            RationalFunc::new(lp(&[(0, 1)]), lp(&[(2, 1), (0, -1)])).unwrap()
        );
        assert_eq!(
            sym(&[2], 1),
            RationalFunc::new(lp(&[(0, -1)]), lp(&[(3, 1), (1, -1)])).unwrap()
        );
        // (m^2 - 2) / (m (m^2 - 1)(m^2 - 4))
        assert_eq!(
            sym(&[1, 1, 1], 1),
            RationalFunc::new(lp(&[(2, 1), (0, -2)]), lp(&[(5, 1), (3, -5), (1, 4)])).unwrap()
        );
        // at dimension N^2
        assert_eq!(
            sym(&[1, 1], 2),
            RationalFunc::new(lp(&[(0, 1)]), lp(&[(4, 1), (0, -1)])).unwrap()
        );
        assert_eq!(
            sym(&[2], 2),
            RationalFunc::new(lp(&[(0, -1)]), lp(&[(6, 1), (2, -1)])).unwrap()
        );
    }

    #[test]
    fn interpolation_matches_direct_elimination() {
        for n in 1..=5 {
            assert_eq!(
                interpolate_symbolic(n).unwrap().unwrap(),
                eliminate_symbolic(n).unwrap()
            );
        }
    }

    #[test]
    fn symbolic_and_numeric_agree() {
        for n in 1..=5 {
            for m in [n as u64, 7, 12] {
                let s = weingarten_class_values(n, 1, &WeingartenConfig::default()).unwrap();
                let q =
                    weingarten_class_values_numeric(n, m, &WeingartenConfig::default()).unwrap();
                for (a, b) in s.iter().zip(&q) {
                    assert_eq!(&a.eval(&int(m as i64)).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn orthogonality_full_matrix() {
        for n in 1..=4 {
            for m in [7u64, 11, 13] {
                let prod = gram_weingarten_product(n, m).unwrap();
                for (i, row) in prod.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        assert_eq!(x, &if i == j { int(1) } else { int(0) });
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_class_system_n5() {
        // row a of G·W at column id is the class system itself
        let n = 5;
        for m in [7u64, 11, 13] {
            let w = weingarten_class_values_numeric(n, m, &WeingartenConfig::default()).unwrap();
            let g = gram_matrix_numeric(n, m);
            let id = ConjugacyClassTable::new(n).identity_index();
            for (a, row) in g.iter().enumerate() {
                let s = row
                    .iter()
                    .zip(&w)
                    .fold(BigRational::zero(), |acc, (x, y)| acc + x * y);
                assert_eq!(s, if a == id { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn asymptotic_examples() {
        let p = |v: Vec<usize>| Partition::from_parts(v);
        assert_eq!(weingarten_asymptotic(&p(vec![1])), (-1, BigInt::from(1)));
        assert_eq!(weingarten_asymptotic(&p(vec![2])), (-3, BigInt::from(-1)));
        assert_eq!(weingarten_asymptotic(&p(vec![3])), (-5, BigInt::from(2)));
        assert_eq!(
            weingarten_asymptotic(&p(vec![4, 2])),
            (-10, BigInt::from(5))
        );
    }

    #[test]
    fn asymptotic_ratio_tends_to_one() {
        let tol = BigRational::new(1.into(), 100.into());
        for n in 1..=5 {
            for class in partitions(n) {
                let r3 = asymptotic_ratio(&class, 1_000).unwrap();
                let r4 = asymptotic_ratio(&class, 10_000).unwrap();
                let one = int(1);
                assert!((&r4 - &one).abs() < tol, "{class}: {r4}");
                assert!((&r4 - &one).abs() <= (&r3 - &one).abs(), "{class}");
            }
        }
    }

    #[test]
    fn depends_only_on_cycle_type() {
        // Σ_τ Wg(σ τ⁻¹) D^{#cycles(τ)} = δ_{σ,id} for every σ, not just the
        // class representatives used to set up the system
        let m = 9u64;
        for n in 1..=4 {
            let table = ConjugacyClassTable::new(n);
            let w = weingarten_class_values_numeric(n, m, &WeingartenConfig::default()).unwrap();
            let all: Vec<Permutation> = permutations(n).collect();
            for sigma in &all {
                let mut s = BigRational::zero();
                for tau in &all {
                    let x = sigma.compose(&tau.inverse()).unwrap();
                    let class = table.index_of(&x.cycle_type()).unwrap();
                    s += &w[class] * int(m as i64).pow(tau.cycle_count() as i32);
                }
                assert_eq!(s, if sigma.is_identity() { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn rejections() {
        let cls = Partition::from_parts(vec![1, 1, 1]);
        assert_eq!(
            weingarten_exact(&cls, Dim::Numeric(2)),
            Err(Error::SingularDimension { dim: 2, n: 3 })
        );
        let cfg = WeingartenConfig { n_max: 2 };
        assert!(matches!(
            weingarten_exact_with(&cls, Dim::Power(1), &cfg),
            Err(Error::TooLarge { n: 3, n_max: 2, .. })
        ));
    }

    #[test]
    fn dim_parsing() {
        assert_eq!("symbolic".parse::<Dim>().unwrap(), Dim::Power(1));
        assert_eq!("N^2".parse::<Dim>().unwrap(), Dim::Power(2));
        assert_eq!("12".parse::<Dim>().unwrap(), Dim::Numeric(12));
        assert!("N^0".parse::<Dim>().is_err());
        assert!("0".parse::<Dim>().is_err());
    }

    #[test]
    fn table_serialization() {
        let t = WeingartenTable::new(2, Dim::Numeric(3)).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"n":2,"dim":"3","values":[{"class":[2],"value":"-1/24"},{"class":[1,1],"value":"1/8"}]}"#
        );
    }
}
