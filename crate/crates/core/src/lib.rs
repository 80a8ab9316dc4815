//! One-shot exact sampling with the Poisson functional representation, and
//! bounds on the exponential (Campbell) cost of communicating the sampled index.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod codes;
pub mod distributions;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod pfr;

pub use error::{Error, Result};
