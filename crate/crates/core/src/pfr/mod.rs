//! The Poisson functional representation sampler and the law of its index.

mod batch;
mod beta;
mod envelope;
mod pmf;
mod sampler;

pub use batch::{sample_batch, stream, SamplerMethod};
pub use beta::{beta, beta_value, BetaMethod, BetaValue};
pub use envelope::{EnvelopeOptions, TailEnvelope};
pub use pmf::{index_pmf, IndexPmf};
pub use sampler::{run_pfr, sample_index_exact, PfrConfig, PfrOutcome, StoppingRule, Termination};
