//! Codeword-length functions, Kraft sums, and the Campbell cost and Rényi
//! entropy of index distributions.

mod cost;
mod length;

pub use cost::{campbell_cost, campbell_optimal, empirical_campbell_cost, renyi_entropy, CampbellCost, EntropyBracket};
pub use length::LengthFunction;
