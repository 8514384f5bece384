//! Bubbles: connected bipartite `d`-regular edge-colored graphs, stored as
//! one permutation per color.
//!
//! White vertex `i` carries a tensor `T`, black vertex `j` its conjugate. The
//! color map `τ_c` sends white `i` to the black vertex joined to it by the
//! color-`c` edge.

mod chain;
mod split;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Permutation;
use crate::error::{Error, Result};

pub use chain::{chain_decomposition, ChainDecomposition, ChainObstruction};
pub use split::ColorSplit;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bubble {
    color_maps: Vec<Permutation>,
}

/// On-disk form: `{"d": 4, "n": 2, "colors": {"1": [2, 1], ...}}` with
/// 1-indexed images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BubbleFile {
    pub d: usize,
    pub n: usize,
    pub colors: BTreeMap<usize, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    NoColors,
    NoVertices,
    MissingColor(usize),
    UnexpectedColor(usize),
    WrongLength {
        color: usize,
        len: usize,
        n: usize,
    },
    NotBijective {
        color: usize,
        reason: String,
    },
    /// White vertices (1-based) of each connected component.
    Disconnected {
        components: Vec<Vec<usize>>,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoColors => write!(f, "a bubble needs at least one color"),
            Diagnostic::NoVertices => write!(f, "a bubble needs at least one vertex pair"),
            Diagnostic::MissingColor(c) => write!(f, "color {c} has no map"),
            Diagnostic::UnexpectedColor(c) => write!(f, "color {c} is outside 1..=d"),
            Diagnostic::WrongLength { color, len, n } => {
                write!(f, "color {color} map has {len} images, expected {n}")
            }
            Diagnostic::NotBijective { color, reason } => {
                write!(f, "color {color} map is not a bijection: {reason}")
            }
            Diagnostic::Disconnected { components } => {
                write!(f, "graph is disconnected; white vertices by component:")?;
                for c in components {
                    write!(f, " {c:?}")?;
                }
                Ok(())
            }
        }
    }
}

/// Non-empty list of problems found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl From<Diagnostics> for Error {
    fn from(d: Diagnostics) -> Error {
        Error::InvalidBubble(d.to_string())
    }
}

/// Checks bijectivity of every color map and connectivity of the graph.
pub fn validate(file: &BubbleFile) -> std::result::Result<(), Diagnostics> {
    parse_maps(file).and_then(|maps| connectivity(&maps))
}

fn parse_maps(file: &BubbleFile) -> std::result::Result<Vec<Permutation>, Diagnostics> {
    let mut diags = Vec::new();
    if file.d == 0 {
        diags.push(Diagnostic::NoColors);
    }
    if file.n == 0 {
        diags.push(Diagnostic::NoVertices);
    }
    for &c in file.colors.keys() {
        if c == 0 || c > file.d {
            diags.push(Diagnostic::UnexpectedColor(c));
        }
    }
    let mut maps = Vec::with_capacity(file.d);
    for c in 1..=file.d {
        let Some(images) = file.colors.get(&c) else {
            diags.push(Diagnostic::MissingColor(c));
            continue;
        };
        if images.len() != file.n {
            diags.push(Diagnostic::WrongLength {
                color: c,
                len: images.len(),
                n: file.n,
            });
            continue;
        }
        match Permutation::from_one_based(images) {
            Ok(p) => maps.push(p),
            Err(e) => diags.push(Diagnostic::NotBijective {
                color: c,
                reason: match e {
                    Error::NotAPermutation { reason, .. } => reason,
                    other => other.to_string(),
                },
            }),
        }
    }
    if diags.is_empty() {
        Ok(maps)
    } else {
        Err(Diagnostics(diags))
    }
}

fn connectivity(maps: &[Permutation]) -> std::result::Result<(), Diagnostics> {
    let n = maps[0].len();
    // union-find over whites 0..n and blacks n..2n
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in maps {
        for i in 0..n {
            let (a, b) = (find(&mut parent, i), find(&mut parent, n + m.image(i)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        components.entry(r).or_default().push(i + 1);
    }
    if components.len() == 1 {
        Ok(())
    } else {
        Err(Diagnostics(vec![Diagnostic::Disconnected {
            components: components.into_values().collect(),
        }]))
    }
}

impl Bubble {
    /// Builds a bubble from one map per color (colors `1..=d` in order),
    /// rejecting disconnected graphs.
    pub fn new(color_maps: Vec<Permutation>) -> Result<Self> {
        let Some(first) = color_maps.first() else {
            return Err(Diagnostics(vec![Diagnostic::NoColors]).into());
        };
        let n = first.len();
        if n == 0 {
            return Err(Diagnostics(vec![Diagnostic::NoVertices]).into());
        }
        for (c, m) in color_maps.iter().enumerate() {
            if m.len() != n {
                return Err(Diagnostics(vec![Diagnostic::WrongLength {
                    color: c + 1,
                    len: m.len(),
                    n,
                }])
                .into());
            }
        }
        connectivity(&color_maps)?;
        Ok(Bubble { color_maps })
    }

    pub fn from_file(file: &BubbleFile) -> Result<Self> {
        let maps = parse_maps(file)?;
        connectivity(&maps)?;
        Ok(Bubble { color_maps: maps })
    }

    pub fn to_file(&self) -> BubbleFile {
        BubbleFile {
            d: self.d(),
            n: self.n(),
            colors: self
                .color_maps
                .iter()
                .enumerate()
                .map(|(c, m)| (c + 1, m.to_one_based()))
                .collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: BubbleFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("bubble file: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("bubble serialization cannot fail")
    }

    /// Number of colors.
    pub fn d(&self) -> usize {
        self.color_maps.len()
    }

    /// Number of white (equivalently black) vertices.
    pub fn n(&self) -> usize {
        self.color_maps[0].len()
    }

    /// Map of the 1-based color `c`.
    pub fn color_map(&self, c: usize) -> Result<&Permutation> {
        c.checked_sub(1)
            .and_then(|i| self.color_maps.get(i))
            .ok_or(Error::InvalidColor {
                color: c,
                d: self.d(),
            })
    }

    pub fn color_maps(&self) -> &[Permutation] {
        &self.color_maps
    }

    /// Re-checks connectivity; always passes for values built through the
    /// public constructors.
    pub fn validate(&self) -> std::result::Result<(), Diagnostics> {
        connectivity(&self.color_maps)
    }

    /// The conjugate bubble (whites and blacks exchanged).
    pub fn conjugate(&self) -> Bubble {
        Bubble {
            color_maps: self.color_maps.iter().map(Permutation::inverse).collect(),
        }
    }

    /// Number of faces of the `(c1, c2)` subgraph: cycles of `τ_{c1}^{-1} ∘ τ_{c2}`.
    pub fn bicolored_cycle_count(&self, c1: usize, c2: usize) -> Result<usize> {
        if c1 == c2 {
            return Err(Error::InvalidColor {
                color: c2,
                d: self.d(),
            });
        }
        let a = self.color_map(c1)?;
        let b = self.color_map(c2)?;
        Ok(a.inverse().compose(b)?.cycle_count())
    }
}

impl fmt::Display for Bubble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bubble(d={}, n={}", self.d(), self.n())?;
        for (c, m) in self.color_maps.iter().enumerate() {
            write!(f, ", {}:{}", c + 1, m)?;
        }
        write!(f, ")")
    }
}

pub fn bicolored_cycle_count(b: &Bubble, c1: usize, c2: usize) -> Result<usize> {
    b.bicolored_cycle_count(c1, c2)
}

/// `tr (M M^†)^k` for the matricization along `split`: a single cycle of `2k`
/// vertices. Column colors are the identity and every row color is the
/// `k`-cycle `i -> i - 1 (mod k)`.
pub fn necklace(split: &ColorSplit, k: usize) -> Result<Bubble> {
    if k == 0 {
        return Err(Error::InvalidBubble(
            "necklace length must be at least 1".into(),
        ));
    }
    let shift = Permutation::rotation(k, -1);
    let maps = (1..=split.d())
        .map(|c| {
            if split.is_column(c) {
                Permutation::identity(k)
            } else {
                shift.clone()
            }
        })
        .collect();
    Bubble::new(maps)
}

/// The `d = 4` bubble `tr_1( tr_3 (MM^†)^k  tr_3 (MM^†)^l )` for the split
/// `C = {2, 4}`: two chains of lengths `k` and `l`, exchanged by color 1 and
/// each closed on itself by color 3.
pub fn partial_trace_pair(k: usize, l: usize) -> Result<Bubble> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidBubble(
            "chain lengths must be at least 1".into(),
        ));
    }
    let split = ColorSplit::new(4, [2, 4])?;
    let cd = ChainDecomposition::from_parts(
        vec![k, l],
        vec![
            (1, Permutation::transposition(2, 0, 1)),
            (3, Permutation::identity(2)),
        ],
    )?;
    cd.to_bubble(&split)
}

/// The single-vertex bubble `Σ |T|^2`.
pub fn dipole(d: usize) -> Result<Bubble> {
    Bubble::new(vec![Permutation::identity(1); d])
}
