//! Closed-form Renyi divergences against adaptive quadrature.

use exact_sampling::distributions::{renyi_divergence, renyi_divergence_numeric, DistributionPair};
use exact_sampling::numerics::QuadratureSpec;

fn main() -> exact_sampling::Result<()> {
    let spec = QuadratureSpec::with_tolerances(1e-12, 1e-10);
    let pairs = [
        ("normal:0,1", "normal:1,1"),
        ("normal:0,1", "normal:0.5,2"),
        ("laplace:0,1", "laplace:1,1"),
        ("laplace:0,3", "laplace:0,1"),
    ];
    println!(
        "{:<14} {:<14} {:>6} {:>14} {:>14}",
        "P", "Q", "order", "closed (bits)", "quadrature"
    );
    for (p, q) in pairs {
        let pair = DistributionPair::new(p.parse()?, q.parse()?)?;
        for order in [0.5, 1.0, 2.0] {
            let closed = renyi_divergence(&pair, order)?;
            let numeric = if closed.is_finite() {
                renyi_divergence_numeric(&pair, order, &spec)?
            } else {
                f64::INFINITY
            };
            println!("{p:<14} {q:<14} {order:>6} {closed:>14.9} {numeric:>14.9}");
        }
    }
    Ok(())
}
