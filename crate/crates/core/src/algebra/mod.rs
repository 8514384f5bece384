//! Exact combinatorial and symbolic arithmetic: permutations, partitions,
//! Catalan numbers, Laurent polynomials and rational functions in `N`.

mod laurent;
mod linear;
mod partition;
mod permutation;
mod poly;
mod rational;

pub use laurent::{format_rational, parse_rational, LaurentPoly, TermRecord};
pub use linear::{solve, Field};
pub use partition::{catalan, partitions, Partition};
pub use permutation::{compose, cycle_type, factorial, permutations, Permutation, Permutations};
pub use rational::RationalFunc;

pub(crate) use permutation::{count_cycles, count_cycles_of_product, for_each_with_first};
