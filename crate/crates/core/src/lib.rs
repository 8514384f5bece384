//! Exact Gaussian expectations of unitary-invariant random tensor
//! observables ("bubbles"), computed three independent ways: Wick
//! enumeration, Weingarten integration over the angular part of a singular
//! value decomposition, and Monte Carlo sampling.

pub mod algebra;
pub mod bubble;
pub mod effective;
pub mod error;
pub mod montecarlo;
pub mod oracle;
pub mod tree;
pub mod weingarten;

pub use algebra::{catalan, LaurentPoly, Partition, Permutation, RationalFunc};
pub use bubble::{Bubble, BubbleFile, ChainDecomposition, ColorSplit};
pub use effective::{PowerSumExpansion, ScalingDiagnostics};
pub use error::{Error, Result};
pub use montecarlo::{Estimate, SampleSpec, Tensor};
pub use oracle::ExpectationResult;
pub use tree::CornerLabeledTree;
pub use weingarten::{ConjugacyClassTable, Dim, WeingartenTable};
