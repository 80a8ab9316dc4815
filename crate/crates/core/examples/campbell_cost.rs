//! Integer codes for the index: Kraft sums, and the Campbell cost each code
//! achieves on the exact index law of a finite pair, next to the bounds.

use exact_sampling::bounds::{lb1, lb2, optimize_ub, UpperBound};
use exact_sampling::codes::{campbell_cost, campbell_optimal, renyi_entropy, LengthFunction};
use exact_sampling::distributions::{DistributionPair, Order};
use exact_sampling::numerics::MinimizeSpec;
use exact_sampling::oracle::sorted_exact_pmf;

fn main() -> exact_sampling::Result<()> {
    let codes = [
        LengthFunction::power_law(0.5)?,
        LengthFunction::universal(0.5)?,
        LengthFunction::OneToOne,
    ];
    for code in &codes {
        let (partial, tail) = code.kraft_sum(1_000_000);
        println!("{code:<14} Kraft sum over 1e6 terms: {partial:.6} (+ tail <= {tail:.2e})");
    }

    let pair = DistributionPair::new("finite:0.99,0.01".parse()?, "finite:0.01,0.99".parse()?)?;
    let pmf = sorted_exact_pmf(&pair)?;
    let alpha = 0.5;
    let t = (1.0 - alpha) / alpha;
    let order = Order::sub_unit(alpha)?;
    println!("\nalpha = {alpha}, t = {t}");
    println!("  max(LB1, LB2) = {:.4}", lb1(&pair, alpha)?.max(lb2(&pair, alpha)?));
    println!("  H_alpha(K)    = {:.4}", renyi_entropy(&pmf, order)?.lower);
    for code in codes.iter().cloned().chain([campbell_optimal(&pmf, order)?]) {
        let l = campbell_cost(&pmf, &code, t, Some(64.0))?;
        println!("  L(t) {code:<14} = {:.4}", l.value);
    }
    let (eps, ub1) = optimize_ub(&pair, alpha, UpperBound::Ub1, &MinimizeSpec::default())?;
    println!("  UB1           = {ub1:.4} (eps = {eps:.4})");
    Ok(())
}
