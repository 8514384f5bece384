use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// An integer partition, parts sorted in weakly decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Sorts the parts; zero parts are dropped.
    pub fn from_parts(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Multiplicities `p_j` = number of parts equal to `j`, for `j = 1..=size`.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.size() + 1];
        for &p in &self.parts {
            m[p] += 1;
        }
        m
    }

    /// Number of permutations of `size()` points with this cycle type:
    /// `n! / prod_j (j^{p_j} p_j!)`.
    pub fn class_size(&self) -> BigUint {
        let n = self.size();
        let mut num = BigUint::one();
        for k in 2..=n {
            num *= k;
        }
        let mut den = BigUint::one();
        for (j, &pj) in self.multiplicities().iter().enumerate().skip(1) {
            for k in 1..=pj {
                den *= j * k;
            }
        }
        num / den
    }

    /// A permutation (0-indexed images) with this cycle type: consecutive
    /// blocks, each a cycle `i -> i + 1`.
    pub fn representative(&self) -> Vec<usize> {
        let mut images = Vec::with_capacity(self.size());
        let mut start = 0;
        for &p in &self.parts {
            for i in 0..p {
                images.push(start + (i + 1) % p);
            }
            start += p;
        }
        images
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = String;

    fn try_from(parts: Vec<usize>) -> Result<Self, String> {
        if parts.contains(&0) {
            return Err("partition parts must be positive".into());
        }
        Ok(Partition::from_parts(parts))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n` in reverse lexicographic order, `(n)` first and
/// `(1, .., 1)` last.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// The `l`-th Catalan number `binom(2l, l) / (l + 1)`.
pub fn catalan(l: u32) -> BigUint {
    // C_{k+1} = C_k * 2(2k+1) / (k+2), exact at every step
    let mut c = BigUint::one();
    for k in 0..l as u64 {
        c = c * (2 * (2 * k + 1)) / (k + 2);
    }
    c
}
