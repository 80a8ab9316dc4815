//! The law of the PFR index: truncated pmf, tail mass, and a bracket on
//! the Renyi entropy H_alpha(K) using the tail envelope.

use exact_sampling::codes::renyi_entropy;
use exact_sampling::distributions::{DistributionPair, Order};
use exact_sampling::numerics::QuadratureSpec;
use exact_sampling::pfr::{index_pmf, EnvelopeOptions, TailEnvelope};

fn main() -> exact_sampling::Result<()> {
    let spec = QuadratureSpec::default();
    for q in ["normal:1,1", "normal:5,1"] {
        let pair = DistributionPair::new("normal:0,1".parse()?, q.parse()?)?;
        let pmf = index_pmf(&pair, 1000, &spec)?;
        println!("P = normal:0,1, Q = {q}");
        println!(
            "  P(K=1) = {:.6}, P(K=2) = {:.6}, P(K>1000) = {:.3e}",
            pmf.prob(1),
            pmf.prob(2),
            pmf.tail_mass()
        );
        if pmf.tail_mass() > 1e-4 {
            println!("  tail too heavy for a useful entropy bracket");
            continue;
        }
        let pmf = pmf.with_envelope(TailEnvelope::build(&pair, 1000, &EnvelopeOptions::default())?);
        for alpha in [0.3, 0.5, 0.9] {
            let h = renyi_entropy(&pmf, Order::sub_unit(alpha)?)?;
            println!("  H_{alpha}(K) in [{:.6}, {:.6}]", h.lower, h.upper);
        }
    }
    Ok(())
}
