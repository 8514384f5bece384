//! Effective observables: the angular average of a chain-expressible bubble
//! at fixed singular values, as a combination of power sums
//! `p_l = Σ_i λ_i^{2l}`, and its evaluation in the complex Wishart ensemble.
//!
//! Writing `M = U D V†`, a chain `(MM†)^{l}` becomes `U D^{2l} U†`. Chain
//! ends are glued by the row colors through permutations `π_c`, and the
//! `U, U†` integral over `U(N^r)` with `r = d − |C|` gives
//!
//! ```text
//! B_C = Σ_{σ,τ ∈ S_m} Wg_{N^r}(στ⁻¹) ∏_{c row} N^{#cycles(π_c σ)} ∏_{γ ∈ cycles(τ)} p_{Σ_{j∈γ} l_j}
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::algebra::{
    catalan, count_cycles, count_cycles_of_product, factorial, for_each_with_first, permutations,
    LaurentPoly, Partition, Permutation, RationalFunc,
};
use crate::bubble::{chain_decomposition, Bubble, ChainDecomposition, ColorSplit};
use crate::error::{Error, Result};
use crate::weingarten::{weingarten_class_values, ConjugacyClassTable, WeingartenConfig};

/// Largest total chain length accepted by the Wishart moment sums.
pub const WISHART_L_MAX: usize = 9;

/// `Σ_terms c(N) ∏ p_{l_i}`, keyed by power multisets sorted descending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSumExpansion {
    terms: BTreeMap<Vec<usize>, RationalFunc>,
    /// The angular group is `U(N^row_power)`.
    pub row_power: u32,
    pub column_power: u32,
}

impl PowerSumExpansion {
    pub fn new(row_power: u32, column_power: u32) -> Self {
        PowerSumExpansion {
            terms: BTreeMap::new(),
            row_power,
            column_power,
        }
    }

    /// Adds `coeff · ∏ p_{powers}`; zero coefficients are dropped.
    pub fn add_term(&mut self, mut powers: Vec<usize>, coeff: RationalFunc) {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        let slot = self
            .terms
            .entry(powers.clone())
            .or_insert_with(RationalFunc::zero);
        *slot = &*slot + &coeff;
        if slot.is_zero() {
            self.terms.remove(&powers);
        }
    }

    pub fn coefficient(&self, powers: &[usize]) -> Option<&RationalFunc> {
        let mut key = powers.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.terms.get(&key)
    }

    /// Terms in descending lexicographic order of the power lists.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &RationalFunc)> {
        self.terms.iter().rev().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for PowerSumExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (powers, coeff)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = powers.iter().map(|l| format!("p_{l}")).collect();
            if *coeff != RationalFunc::one() {
                let c = coeff.to_string();
                if c.contains(' ') && !c.starts_with('(') {
                    write!(f, "({c})*")?;
                } else {
                    write!(f, "{c}*")?;
                }
            }
            write!(f, "{}", mono.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct TermOut<'a> {
    powers: &'a [usize],
    coeff: &'a RationalFunc,
}

impl Serialize for PowerSumExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (powers, coeff) in self.terms() {
            seq.serialize_element(&TermOut { powers, coeff })?;
        }
        seq.end()
    }
}

/// Cycle type of `p ∘ q` for raw image slices.
fn product_cycle_type(p: &[usize], q: &[usize]) -> Partition {
    let n = q.len();
    let mut seen = vec![false; n];
    let mut parts = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = p[q[j]];
            len += 1;
        }
        parts.push(len);
    }
    Partition::from_parts(parts)
}

/// Power multiset `{Σ_{j ∈ γ} l_j : γ a cycle of τ}`, sorted descending.
fn cycle_powers(tau: &Permutation, lengths: &[usize]) -> Vec<usize> {
    let mut powers: Vec<usize> = tau
        .cycles()
        .iter()
        .map(|cyc| cyc.iter().map(|&j| lengths[j]).sum())
        .collect();
    powers.sort_unstable_by(|a, b| b.cmp(a));
    powers
}

fn decompose(b: &Bubble, split: &ColorSplit) -> Result<ChainDecomposition> {
    Ok(chain_decomposition(b, split)?)
}

fn check_chains(m: usize, config: &WeingartenConfig) -> Result<()> {
    if m > config.n_max {
        return Err(Error::TooLarge {
            what: "angular integral over chains",
            n: m,
            n_max: config.n_max,
            estimated_ops: (factorial(m) as f64).powi(2),
        });
    }
    Ok(())
}

pub fn effective_observable(b: &Bubble, split: &ColorSplit) -> Result<PowerSumExpansion> {
    effective_observable_with(b, split, &WeingartenConfig::default())
}

pub fn effective_observable_with(
    b: &Bubble,
    split: &ColorSplit,
    config: &WeingartenConfig,
) -> Result<PowerSumExpansion> {
    let cd = decompose(b, split)?;
    effective_from_chains(&cd, split, config)
}

/// [`effective_observable`] starting from a chain decomposition.
pub fn effective_from_chains(
    cd: &ChainDecomposition,
    split: &ColorSplit,
    config: &WeingartenConfig,
) -> Result<PowerSumExpansion> {
    let m = cd.num_chains();
    check_chains(m, config)?;
    let r = split.row_power();
    let wg = weingarten_class_values(m, r, config)?;
    let table = ConjugacyClassTable::new(m);
    let lengths = cd.chain_lengths();
    let endpoint: Vec<&[usize]> = cd.endpoint_maps().iter().map(|(_, p)| p.images()).collect();

    let taus: Vec<Permutation> = permutations(m).collect();
    // intern the power multisets of every τ
    let mut power_keys: Vec<Vec<usize>> = Vec::new();
    let tau_power: Vec<usize> = taus
        .iter()
        .map(|t| {
            let key = cycle_powers(t, lengths);
            match power_keys.iter().position(|k| k == &key) {
                Some(i) => i,
                None => {
                    power_keys.push(key);
                    power_keys.len() - 1
                }
            }
        })
        .collect();
    let tau_inv: Vec<Permutation> = taus.iter().map(Permutation::inverse).collect();

    // (power key, class, N-exponent from the row colors) -> count
    let partial: Vec<BTreeMap<(usize, usize, usize), u64>> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut acc = BTreeMap::new();
            for_each_with_first(m, first, |sigma| {
                let e: usize = endpoint
                    .iter()
                    .map(|pi| count_cycles_of_product(pi, sigma))
                    .sum();
                for (t, inv) in tau_inv.iter().enumerate() {
                    let class = table
                        .index_of(&product_cycle_type(sigma, inv.images()))
                        .expect("every cycle type is a class");
                    *acc.entry((tau_power[t], class, e)).or_insert(0u64) += 1;
                }
            });
            acc
        })
        .collect();
    let mut counts: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
    for part in partial {
        for (k, v) in part {
            *counts.entry(k).or_default() += v;
        }
    }

    let mut grouped: BTreeMap<(usize, usize), LaurentPoly> = BTreeMap::new();
    for ((p, class, e), c) in counts {
        grouped
            .entry((p, class))
            .or_insert_with(LaurentPoly::zero)
            .add_term(e as i64, BigRational::from_integer(c.into()));
    }
    let mut out = PowerSumExpansion::new(r, split.column_power());
    for ((p, class), poly) in grouped {
        out.add_term(
            power_keys[p].clone(),
            &wg[class] * &RationalFunc::from_laurent(poly),
        );
    }
    Ok(out)
}

/// Enumerates `S_L` split by first image, summing `weight(#cycles(γπ), #cycles(π))`.
fn wishart_sum<T: Send>(
    lengths: &[usize],
    init: impl Fn() -> T + Sync,
    step: impl Fn(&mut T, usize, usize) + Sync,
) -> Result<Vec<T>> {
    let total: usize = lengths.iter().sum();
    if total == 0 || lengths.contains(&0) {
        return Err(Error::Parse("chain lengths must be positive".into()));
    }
    if total > WISHART_L_MAX {
        return Err(Error::TooLarge {
            what: "Wishart moment",
            n: total,
            n_max: WISHART_L_MAX,
            estimated_ops: factorial(total) as f64 * total as f64,
        });
    }
    let gamma = canonical_cycle(lengths);
    Ok((0..total)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            for_each_with_first(total, first, |pi| {
                step(
                    &mut acc,
                    count_cycles_of_product(&gamma, pi),
                    count_cycles(pi),
                );
            });
            acc
        })
        .collect())
}

/// The permutation with cycles `(0..l_1)(l_1..l_1+l_2)…`, each `i → i+1`.
fn canonical_cycle(lengths: &[usize]) -> Vec<usize> {
    let mut gamma = Vec::with_capacity(lengths.iter().sum());
    let mut start = 0;
    for &l in lengths {
        for i in 0..l {
            gamma.push(start + (i + 1) % l);
        }
        start += l;
    }
    gamma
}

/// `⟨∏_j tr W^{l_j}⟩` for `W = MM†`, `M` an `N^row × N^col` matrix with unit
/// covariance: `Σ_{π ∈ S_L} row^{#cycles(γπ)} col^{#cycles(π)}`.
pub fn wishart_moment(lengths: &[usize], row_power: u32, column_power: u32) -> Result<LaurentPoly> {
    let width = lengths.iter().sum::<usize>() + 1;
    let parts = wishart_sum(
        lengths,
        || vec![vec![0u64; width]; width],
        |h, a, b| h[a][b] += 1,
    )?;
    let mut out = LaurentPoly::zero();
    for part in parts {
        for (a, row) in part.iter().enumerate() {
            for (b, &c) in row.iter().enumerate().filter(|(_, &c)| c > 0) {
                out.add_term(
                    (a as u32 * row_power + b as u32 * column_power) as i64,
                    BigRational::from_integer(c.into()),
                );
            }
        }
    }
    Ok(out)
}

/// The same moment at numeric row and column dimensions.
pub fn wishart_moment_numeric(lengths: &[usize], rows: u64, cols: u64) -> Result<BigUint> {
    let width = lengths.iter().sum::<usize>() + 1;
    let parts = wishart_sum(
        lengths,
        || vec![vec![0u64; width]; width],
        |h, a, b| h[a][b] += 1,
    )?;
    let mut out = BigUint::from(0u32);
    for part in parts {
        for (a, row) in part.iter().enumerate() {
            for (b, &c) in row.iter().enumerate().filter(|(_, &c)| c > 0) {
                out += BigUint::from(c)
                    * BigUint::from(rows).pow(a as u32)
                    * BigUint::from(cols).pow(b as u32);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Balance {
    Square,
    Unbalanced,
}

impl Balance {
    pub fn of(split: &ColorSplit) -> Self {
        if split.is_square() {
            Balance::Square
        } else {
            Balance::Unbalanced
        }
    }
}

/// Large-`N` coefficient of `⟨tr W^l⟩`: `Cat_l` when rows and columns
/// have the same dimension, otherwise 1.
pub fn wishart_moment_leading(l: u32, balance: Balance) -> BigUint {
    match balance {
        Balance::Square => catalan(l),
        Balance::Unbalanced => BigUint::one(),
    }
}

/// `Σ_terms c(N) ⟨∏ p_{l_i}⟩`: the bubble expectation recomputed through
/// the singular values.
pub fn laguerre_reconstruct(
    e: &PowerSumExpansion,
    row_power: u32,
    column_power: u32,
) -> Result<LaurentPoly> {
    let mut total = RationalFunc::zero();
    for (powers, coeff) in e.terms() {
        let moment = RationalFunc::from_laurent(wishart_moment(powers, row_power, column_power)?);
        total = &total + &(coeff * &moment);
    }
    total
        .to_laurent()
        .ok_or_else(|| Error::NotPolynomial(total.to_string()))
}

/// Cycle counts and large-`N` exponent of one `(σ, τ)` term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingDiagnostics {
    pub sigma: Permutation,
    pub tau: Permutation,
    /// `(row color, #cycles(π_c σ))`.
    pub row_cycles: Vec<(usize, usize)>,
    pub f_box: usize,
    pub f_0: usize,
    pub exponent: i64,
}

impl ScalingDiagnostics {
    pub fn fixes(&self, chain: usize) -> bool {
        self.sigma.image(chain) == chain && self.tau.image(chain) == chain
    }
}

/// One entry per `(σ, τ) ∈ S_m × S_m`, `σ` outer, lexicographic.
///
/// With `r = d − |C|`, `s = min(r, |C|)`, each term scales as
/// `N^{Σ_c F_c + r(F_0 − 2m) + s·F_□}` relative to the common factor
/// `N^{max(r,|C|)·n}`, where `F_c = #cycles(π_c σ)`, `F_□ = #cycles(τ)` and
/// `F_0 = #cycles(στ⁻¹)`.
pub fn scaling_diagnostics(b: &Bubble, split: &ColorSplit) -> Result<Vec<ScalingDiagnostics>> {
    let cd = decompose(b, split)?;
    diagnostics_from_chains(&cd, split)
}

pub fn diagnostics_from_chains(
    cd: &ChainDecomposition,
    split: &ColorSplit,
) -> Result<Vec<ScalingDiagnostics>> {
    let m = cd.num_chains();
    check_chains(m, &WeingartenConfig { n_max: 7 })?;
    let r = split.row_power() as i64;
    let s = r.min(split.column_power() as i64);
    let all: Vec<Permutation> = permutations(m).collect();
    let mut out = Vec::with_capacity(all.len() * all.len());
    for sigma in &all {
        let row_cycles: Vec<(usize, usize)> = cd
            .endpoint_maps()
            .iter()
            .map(|(c, pi)| (*c, count_cycles_of_product(pi.images(), sigma.images())))
            .collect();
        let f_rows: i64 = row_cycles.iter().map(|&(_, f)| f as i64).sum();
        for tau in &all {
            let f_box = tau.cycle_count();
            let f_0 = count_cycles_of_product(sigma.images(), tau.inverse().images());
            out.push(ScalingDiagnostics {
                sigma: sigma.clone(),
                tau: tau.clone(),
                row_cycles: row_cycles.clone(),
                f_box,
                f_0,
                exponent: f_rows + r * (f_0 as i64 - 2 * m as i64) + s * f_box as i64,
            });
        }
    }
    Ok(out)
}

/// The terms attaining the largest exponent.
pub fn maximal_terms(diags: &[ScalingDiagnostics]) -> Vec<&ScalingDiagnostics> {
    let Some(max) = diags.iter().map(|d| d.exponent).max() else {
        return Vec::new();
    };
    diags.iter().filter(|d| d.exponent == max).collect()
}

/// CSV with columns `sigma, tau, F<c>…, Fbox, F0, exponent`; permutations
/// are written 1-based as space-separated images.
pub fn diagnostics_csv(diags: &[ScalingDiagnostics]) -> String {
    let mut out = String::from("sigma,tau");
    if let Some(first) = diags.first() {
        for (c, _) in &first.row_cycles {
            out.push_str(&format!(",F{c}"));
        }
    }
    out.push_str(",Fbox,F0,exponent\n");
    let fmt_perm = |p: &Permutation| {
        p.to_one_based()
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for d in diags {
        out.push_str(&fmt_perm(&d.sigma));
        out.push(',');
        out.push_str(&fmt_perm(&d.tau));
        for (_, f) in &d.row_cycles {
            out.push_str(&format!(",{f}"));
        }
        out.push_str(&format!(",{},{},{}\n", d.f_box, d.f_0, d.exponent));
    }
    out
}
