//! Runs the Poisson functional representation and the conditional
//! geometric sampler, and checks that the accepted samples follow P.

use exact_sampling::distributions::DistributionPair;
use exact_sampling::numerics::QuadratureSpec;
use exact_sampling::oracle::accepted_gof;
use exact_sampling::pfr::{sample_batch, PfrConfig, SamplerMethod, Termination};

fn main() -> exact_sampling::Result<()> {
    let pair = DistributionPair::new("normal:0,1".parse()?, "normal:1,1".parse()?)?;
    let cfg = PfrConfig::with_delta(1e-8);
    let spec = QuadratureSpec::default();
    for method in [SamplerMethod::Pfr, SamplerMethod::Exact] {
        let draws: Vec<_> = sample_batch(&pair, 20_000, 1, method, &cfg, &spec)
            .into_iter()
            .collect::<exact_sampling::Result<_>>()?;
        let mean_k = draws.iter().map(|o| o.index as f64).sum::<f64>() / draws.len() as f64;
        let examined = draws.iter().map(|o| o.candidates_examined).sum::<u64>() as f64 / draws.len() as f64;
        let exact = draws.iter().filter(|o| o.termination == Termination::Exact).count();
        let ks = accepted_gof(&pair, &draws)?;
        println!(
            "{method:?}: mean K = {mean_k:.3}, candidates per run = {examined:.1}, exact stops = {exact}, KS p = {:.3}",
            ks.p_value
        );
    }
    Ok(())
}
