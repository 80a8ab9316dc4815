//! Scalar laws, likelihood ratios and divergences.

mod divergence;
mod pair;
mod parse;
mod scalar;

pub use divergence::{kl_divergence, renyi_divergence, renyi_divergence_numeric, Order};
pub use pair::{DistributionPair, Monotonicity};
pub use scalar::{Point, ScalarDistribution};
