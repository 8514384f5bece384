//! Decomposition of a bubble into products of `M M^†` relative to a split.
//!
//! When all column colors agree, white `i` and black `ρ(i)` form one matrix
//! element `(MM^†)_{x y}` with `x` the row index of the white and `y` that
//! of the black. Consecutive factors multiply whenever every row color joins
//! the black of one factor to the same next white. Maximal runs are chains
//! `(MM^†)^{l_j}`; the row colors then glue exposed chain ends to exposed
//! chain starts through one permutation `π_c` per row color.

use std::fmt;

use super::{Bubble, ColorSplit};
use crate::algebra::Permutation;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    lengths: Vec<usize>,
    /// `(row color, π_c)`, ascending by color.
    endpoint_maps: Vec<(usize, Permutation)>,
    /// White vertices (0-based) of each chain in order; empty when the
    /// decomposition was built from parts.
    chains: Vec<Vec<usize>>,
}

/// Why a bubble is not a function of `MM^†` for the requested split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainObstruction {
    ColorCount {
        bubble: usize,
        split: usize,
    },
    /// Two column colors join some white vertex to different blacks.
    ColumnColorsDiffer {
        first: usize,
        second: usize,
        white: usize,
    },
}

impl fmt::Display for ChainObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainObstruction::ColorCount { bubble, split } => {
                write!(f, "bubble has {bubble} colors but the split has {split}")
            }
            ChainObstruction::ColumnColorsDiffer {
                first,
                second,
                white,
            } => write!(
                f,
                "column colors {first} and {second} join white vertex {white} to different \
                 black vertices, so the polynomial is not a function of MM^dagger"
            ),
        }
    }
}

impl From<ChainObstruction> for Error {
    fn from(o: ChainObstruction) -> Error {
        Error::NotChainExpressible(o.to_string())
    }
}

pub fn chain_decomposition(
    b: &Bubble,
    split: &ColorSplit,
) -> std::result::Result<ChainDecomposition, ChainObstruction> {
    if b.d() != split.d() {
        return Err(ChainObstruction::ColorCount {
            bubble: b.d(),
            split: split.d(),
        });
    }
    let n = b.n();
    let mut columns = split.column_colors();
    let first = columns.next().expect("split has a column color");
    let rho = &b.color_maps[first - 1];
    for c in columns {
        let other = &b.color_maps[c - 1];
        if let Some(w) = (0..n).find(|&i| other.image(i) != rho.image(i)) {
            return Err(ChainObstruction::ColumnColorsDiffer {
                first,
                second: c,
                white: w + 1,
            });
        }
    }

    let rows: Vec<usize> = split.row_colors().collect();
    // black -> white for each row color
    let back: Vec<Permutation> = rows
        .iter()
        .map(|&c| b.color_maps[c - 1].inverse())
        .collect();
    let glued_next = |w: usize| -> Option<usize> {
        let black = rho.image(w);
        let next = back[0].image(black);
        back[1..]
            .iter()
            .all(|p| p.image(black) == next)
            .then_some(next)
    };

    let mut has_pred = vec![false; n];
    for w in 0..n {
        if let Some(x) = glued_next(w) {
            has_pred[x] = true;
        }
    }
    let mut seen = vec![false; n];
    let mut chains = Vec::new();
    // open chains first, then closed ones (pure traces), each from its
    // smallest white
    for s in (0..n).filter(|&s| !has_pred[s]) {
        let mut chain = vec![s];
        seen[s] = true;
        let mut w = s;
        while let Some(x) = glued_next(w) {
            chain.push(x);
            seen[x] = true;
            w = x;
        }
        chains.push(chain);
    }
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut chain = vec![s];
        seen[s] = true;
        let mut w = s;
        loop {
            let x = glued_next(w).expect("closed chains are fully glued");
            if x == s {
                break;
            }
            chain.push(x);
            seen[x] = true;
            w = x;
        }
        chains.push(chain);
    }

    let mut chain_of_start = vec![usize::MAX; n];
    for (j, ch) in chains.iter().enumerate() {
        chain_of_start[ch[0]] = j;
    }
    let endpoint_maps = rows
        .iter()
        .zip(&back)
        .map(|(&c, inv)| {
            let images = chains
                .iter()
                .map(|ch| {
                    let end = *ch.last().unwrap();
                    let j = chain_of_start[inv.image(rho.image(end))];
                    debug_assert!(j != usize::MAX, "chain ends always meet chain starts");
                    j
                })
                .collect();
            (c, Permutation::from_images_unchecked(images))
        })
        .collect();

    Ok(ChainDecomposition {
        lengths: chains.iter().map(Vec::len).collect(),
        endpoint_maps,
        chains,
    })
}

impl ChainDecomposition {
    /// Builds a decomposition directly from chain lengths and one endpoint
    /// map per row color.
    pub fn from_parts(
        lengths: Vec<usize>,
        mut endpoint_maps: Vec<(usize, Permutation)>,
    ) -> Result<Self> {
        let m = lengths.len();
        if m == 0 || lengths.contains(&0) {
            return Err(Error::InvalidBubble(
                "chain lengths must be positive".into(),
            ));
        }
        if let Some((c, p)) = endpoint_maps.iter().find(|(_, p)| p.len() != m) {
            return Err(Error::InvalidBubble(format!(
                "endpoint map of color {c} acts on {} chains, expected {m}",
                p.len()
            )));
        }
        endpoint_maps.sort_by_key(|(c, _)| *c);
        Ok(ChainDecomposition {
            lengths,
            endpoint_maps,
            chains: Vec::new(),
        })
    }

    pub fn chain_lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn num_chains(&self) -> usize {
        self.lengths.len()
    }

    /// Sum of the chain lengths (= `n` of the source bubble).
    pub fn total_length(&self) -> usize {
        self.lengths.iter().sum()
    }

    pub fn endpoint_maps(&self) -> &[(usize, Permutation)] {
        &self.endpoint_maps
    }

    pub fn endpoint_map(&self, color: usize) -> Option<&Permutation> {
        self.endpoint_maps
            .iter()
            .find(|(c, _)| *c == color)
            .map(|(_, p)| p)
    }

    /// White vertices (0-based) of every chain, when known.
    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    /// Index of the chain holding white vertex `w` (0-based).
    pub fn chain_of_white(&self, w: usize) -> Option<usize> {
        self.chains.iter().position(|ch| ch.contains(&w))
    }

    /// Rebuilds a bubble: whites numbered chain after chain, column colors
    /// the identity, row colors stepping back along each chain and joining
    /// the end of chain `j` to the start of chain `π_c(j)`.
    pub fn to_bubble(&self, split: &ColorSplit) -> Result<Bubble> {
        let rows: Vec<usize> = split.row_colors().collect();
        let colors: Vec<usize> = self.endpoint_maps.iter().map(|(c, _)| *c).collect();
        if rows != colors {
            return Err(Error::InvalidSplit(format!(
                "split row colors {rows:?} do not match endpoint map colors {colors:?}"
            )));
        }
        let n = self.total_length();
        let starts: Vec<usize> = self
            .lengths
            .iter()
            .scan(0, |acc, &l| {
                let s = *acc;
                *acc += l;
                Some(s)
            })
            .collect();
        let mut maps = Vec::with_capacity(split.d());
        for c in 1..=split.d() {
            if split.is_column(c) {
                maps.push(Permutation::identity(n));
                continue;
            }
            let pi = self.endpoint_map(c).expect("checked above");
            let mut images = vec![0; n];
            for (j, (&s, &l)) in starts.iter().zip(&self.lengths).enumerate() {
                for (i, img) in images.iter_mut().enumerate().take(s + l).skip(s + 1) {
                    *img = i - 1;
                }
                images[starts[pi.image(j)]] = s + l - 1;
            }
            maps.push(Permutation::from_images(images)?);
        }
        Bubble::new(maps)
    }
}
