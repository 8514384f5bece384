use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Partition of the colors `1..=d` into column colors `C` and row colors.
///
/// Matricizing a tensor along a split gives a matrix `M` of size
/// `N^{d-|C|} x N^{|C|}`: rows are indexed by the row colors, columns by `C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColorSplit {
    d: usize,
    columns: BTreeSet<usize>,
}

impl ColorSplit {
    /// `columns` holds 1-based colors; it must be nonempty and proper.
    pub fn new(d: usize, columns: impl IntoIterator<Item = usize>) -> Result<Self> {
        let columns: BTreeSet<usize> = columns.into_iter().collect();
        if let Some(&c) = columns.iter().find(|&&c| c == 0 || c > d) {
            return Err(Error::InvalidSplit(format!("color {c} is not in 1..={d}")));
        }
        if columns.is_empty() || columns.len() == d {
            return Err(Error::InvalidSplit(format!(
                "column colors must be a nonempty proper subset of 1..={d}"
            )));
        }
        Ok(ColorSplit { d, columns })
    }

    /// Parses a comma-separated color list such as `"2,4"`.
    pub fn parse(d: usize, s: &str) -> Result<Self> {
        let colors = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad color {t:?} in split {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, colors)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn column_colors(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns.iter().copied()
    }

    pub fn row_colors(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.d).filter(|c| !self.columns.contains(c))
    }

    pub fn is_column(&self, color: usize) -> bool {
        self.columns.contains(&color)
    }

    /// `N`-exponent of the row dimension, `d - |C|`.
    pub fn row_power(&self) -> u32 {
        (self.d - self.columns.len()) as u32
    }

    /// `N`-exponent of the column dimension, `|C|`.
    pub fn column_power(&self) -> u32 {
        self.columns.len() as u32
    }

    pub fn is_square(&self) -> bool {
        self.row_power() == self.column_power()
    }
}

impl fmt::Display for ColorSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", cols.join(","))
    }
}

/// Parses `"d:c1,c2,..."`; convenient in tests and on the command line.
impl FromStr for ColorSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (d, cols) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected d:colors, got {s:?}")))?;
        let d = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad color count in {s:?}")))?;
        Self::parse(d, cols)
    }
}
