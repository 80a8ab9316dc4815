use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::{run_pfr, sample_index_exact, PfrConfig, PfrOutcome};
use crate::distributions::DistributionPair;
use crate::error::Result;
use crate::numerics::QuadratureSpec;

/// Which sampler a batch uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerMethod {
    /// Simulate the Poisson process ([`run_pfr`]).
    Pfr,
    /// Conditional geometric construction ([`sample_index_exact`]).
    #[default]
    Exact,
}

impl std::str::FromStr for SamplerMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pfr" => Ok(SamplerMethod::Pfr),
            "exact" => Ok(SamplerMethod::Exact),
            _ => Err(crate::Error::Parse(format!("unknown sampler {s:?}"))),
        }
    }
}

/// The RNG of draw `i` in a batch rooted at `root_seed`: ChaCha8 seeded with
/// `root_seed ^ i`.
pub fn stream(root_seed: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(root_seed ^ i)
}

/// `n` independent draws, computed in parallel. Draw `i` consumes only
/// [`stream`]`(root_seed, i)`, so the output does not depend on scheduling.
pub fn sample_batch(
    pair: &DistributionPair,
    n: u64,
    root_seed: u64,
    method: SamplerMethod,
    config: &PfrConfig,
    spec: &QuadratureSpec,
) -> Vec<Result<PfrOutcome>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(root_seed, i);
            match method {
                SamplerMethod::Pfr => run_pfr(pair, &mut rng, config),
                SamplerMethod::Exact => sample_index_exact(pair, &mut rng, spec),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batches_are_reproducible() {
        let pair = DistributionPair::new("normal:0,1".parse().unwrap(), "normal:1,1".parse().unwrap()).unwrap();
        let spec = QuadratureSpec::default();
        let cfg = PfrConfig::default();
        for method in [SamplerMethod::Pfr, SamplerMethod::Exact] {
            let a = sample_batch(&pair, 500, 9, method, &cfg, &spec);
            let b = sample_batch(&pair, 500, 9, method, &cfg, &spec);
            let seq: Vec<_> = (0..500)
                .map(|i| {
                    let mut rng = stream(9, i);
                    match method {
                        SamplerMethod::Pfr => run_pfr(&pair, &mut rng, &cfg).unwrap(),
                        SamplerMethod::Exact => sample_index_exact(&pair, &mut rng, &spec).unwrap(),
                    }
                })
                .collect();
            let a: Vec<_> = a.into_iter().map(|r| r.unwrap()).collect();
            let b: Vec<_> = b.into_iter().map(|r| r.unwrap()).collect();
            assert_eq!(a, b);
            assert_eq!(a, seq);
        }
    }
}
