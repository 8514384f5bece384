//! Permutations of `{0, .., n-1}` stored in one-line notation.
//!
//! The composition convention is fixed project-wide: `p.compose(&q)` applies
//! `q` first and then `p`, i.e. `(p ∘ q)(i) = p(q(i))`. Files and the CLI use
//! 1-indexed images; internally everything is 0-indexed.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::partition::Partition;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 0-indexed images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for (i, &x) in images.iter().enumerate() {
            if x >= n {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("image of {} is {} (out of range)", i + 1, x + 1),
                });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("{} is hit twice", x + 1),
                });
            }
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-indexed images (the file format).
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let shifted = images
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                x.checked_sub(1).ok_or_else(|| Error::NotAPermutation {
                    n,
                    reason: format!("image of {} is 0; images are 1-indexed", i + 1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(shifted)
    }

    /// Cyclic shift `i -> i + shift (mod n)`.
    pub fn rotation(n: usize, shift: isize) -> Self {
        let m = n as isize;
        Permutation {
            images: (0..m)
                .map(|i| (i + shift).rem_euclid(m.max(1)) as usize)
                .collect(),
        }
    }

    /// The transposition of `a` and `b` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `self ∘ q`: apply `q` first, then `self`.
    pub fn compose(&self, q: &Permutation) -> Result<Self> {
        if self.len() != q.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: q.len(),
            });
        }
        Ok(Permutation {
            images: q.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    /// Cycles in order of their smallest element, each starting at it.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        count_cycles(&self.images)
    }

    pub fn cycle_type(&self) -> Partition {
        Partition::from_parts(self.cycles().iter().map(Vec::len).collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", x + 1)?;
        }
        write!(f, "]")
    }
}

/// Serialized as the 1-based image list.
impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.images.iter().map(|x| x + 1))
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_one_based(&images).map_err(serde::de::Error::custom)
    }
}

/// `compose(p, q)` applies `q` first, then `p`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    p.compose(q)
}

pub fn cycle_type(p: &Permutation) -> Partition {
    p.cycle_type()
}

// Hot-path helpers over raw image slices. Inputs must be permutations of 0..n
// with n <= 64.

pub(crate) fn count_cycles(images: &[usize]) -> usize {
    let mut seen: u64 = 0;
    let mut count = 0;
    for start in 0..images.len() {
        if seen >> start & 1 == 1 {
            continue;
        }
        count += 1;
        let mut j = start;
        while seen >> j & 1 == 0 {
            seen |= 1 << j;
            j = images[j];
        }
    }
    count
}

/// Cycle count of `p ∘ q` without allocating.
pub(crate) fn count_cycles_of_product(p: &[usize], q: &[usize]) -> usize {
    let mut seen: u64 = 0;
    let mut count = 0;
    for start in 0..q.len() {
        if seen >> start & 1 == 1 {
            continue;
        }
        count += 1;
        let mut j = start;
        while seen >> j & 1 == 0 {
            seen |= 1 << j;
            j = p[q[j]];
        }
    }
    count
}

/// Rearranges `perm` into the lexicographically next permutation; returns
/// `false` (leaving it sorted ascending) after the last one.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        perm.reverse();
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Lexicographic iterator over all permutations of `0..n`.
pub struct Permutations {
    current: Vec<usize>,
    done: bool,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let out = Permutation {
            images: self.current.clone(),
        };
        self.done = !next_permutation(&mut self.current);
        Some(out)
    }
}

pub fn permutations(n: usize) -> Permutations {
    Permutations {
        current: (0..n).collect(),
        done: false,
    }
}

/// Calls `f` on every permutation of `0..n` whose first image is `first`,
/// in lexicographic order. Used to split enumerations into disjoint ranges.
pub(crate) fn for_each_with_first(n: usize, first: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    perm.push(first);
    perm.extend((0..n).filter(|&x| x != first));
    loop {
        f(&perm);
        if !next_permutation(&mut perm[1..]) {
            break;
        }
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_one_based(images).unwrap()
    }

    #[test]
    fn compose_examples() {
        let q = perm(&[3, 1, 2]);
        let id = Permutation::identity(3);
        assert_eq!(compose(&id, &q).unwrap(), q);
        assert_eq!(compose(&q, &q.inverse()).unwrap(), id);
        let swap = perm(&[2, 1]);
        assert_eq!(compose(&swap, &swap).unwrap(), Permutation::identity(2));
    }

    #[test]
    fn compose_applies_right_argument_first() {
        let p = perm(&[2, 1, 3]);
        let q = perm(&[1, 3, 2]);
        // q: 1->1, then p: 1->2
        assert_eq!(compose(&p, &q).unwrap().to_one_based(), vec![2, 3, 1]);
    }

    #[test]
    fn compose_length_mismatch() {
        let err = compose(&Permutation::identity(2), &Permutation::identity(3)).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { left: 2, right: 3 });
    }

    #[test]
    fn cycle_type_examples() {
        assert_eq!(Permutation::identity(3).cycle_type().parts(), &[1, 1, 1]);
        assert_eq!(perm(&[2, 1]).cycle_type().parts(), &[2]);
        assert_eq!(perm(&[2, 3, 1]).cycle_type().parts(), &[3]);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_one_based(&[1, 1]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 3]).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let all: Vec<_> = permutations(4).collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(permutations(0).count(), 1);

        let mut split = Vec::new();
        for first in 0..4 {
            for_each_with_first(4, first, |p| split.push(p.to_vec()));
        }
        let flat: Vec<_> = all.iter().map(|p| p.images().to_vec()).collect();
        assert_eq!(split, flat);
    }

    #[test]
    fn composition_is_associative_and_conjugation_preserves_cycle_type() {
        for n in 1..=6 {
            let all: Vec<_> = permutations(n).collect();
            for p in &all {
                let pinv = p.inverse();
                for q in &all {
                    let conj = p.compose(q).unwrap().compose(&pinv).unwrap();
                    assert_eq!(conj.cycle_type(), q.cycle_type());
                }
            }
            for p in all.iter().step_by(7) {
                for q in all.iter().step_by(5) {
                    for r in all.iter().step_by(3) {
                        let left = p.compose(q).unwrap().compose(r).unwrap();
                        let right = p.compose(&q.compose(r).unwrap()).unwrap();
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn raw_cycle_helpers_agree() {
        let all: Vec<_> = permutations(5).collect();
        for p in all.iter().step_by(3) {
            assert_eq!(count_cycles(p.images()), p.cycles().len());
            for q in all.iter().step_by(11) {
                let pq = p.compose(q).unwrap();
                assert_eq!(
                    count_cycles_of_product(p.images(), q.images()),
                    pq.cycle_count()
                );
            }
        }
    }
}
