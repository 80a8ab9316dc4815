//! A reduced run of the verification suite: geometric moments, exact code
//! costs and the entropy sandwich, plus a small Monte Carlo moment check.

use exact_sampling::distributions::DistributionPair;
use exact_sampling::oracle::{run_suite, verify_log_moment, verify_moment_bounds, CheckKind, SuiteConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> exact_sampling::Result<()> {
    let cfg = SuiteConfig {
        only: vec![CheckKind::Geometric, CheckKind::Code, CheckKind::Sandwich],
        alphas: vec![0.5, 0.9],
        ..SuiteConfig::default()
    };
    let lines = run_suite(&cfg)?;
    for line in &lines {
        println!("{line}");
    }

    let pair = DistributionPair::new("laplace:0,1".parse()?, "laplace:2,1".parse()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = verify_moment_bounds(&pair, 0.5, 100_000, &mut rng)?;
    println!(
        "\nE[K^0.5] = {:.4} +- {:.4}, band [{:.4}, {:.4}], pass = {}",
        m.empirical_moment,
        m.std_error,
        m.band_lower,
        m.band_upper,
        m.passed()
    );
    let l = verify_log_moment(&pair, 100_000, &mut rng)?;
    println!("E[log K] = {:.4} <= {:.4}: {}", l.empirical, l.bound, l.passed());
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("{} checks, {failed} failed", lines.len());
    Ok(())
}
