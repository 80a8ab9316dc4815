//! Renders a bound sweep as an SVG line chart in the system temp directory.

use exact_sampling::bounds::{laplace_alpha_grid, sweep};
use exact_sampling::cli::{LineChart, Series};
use exact_sampling::distributions::DistributionPair;
use exact_sampling::numerics::MinimizeSpec;

fn main() -> exact_sampling::Result<()> {
    let pair = DistributionPair::new("laplace:0,1".parse()?, "laplace:1,2".parse()?)?;
    let rows = sweep(&pair, &laplace_alpha_grid(), &MinimizeSpec::default())?;
    let chart = LineChart {
        title: "P = Laplace(0,1), Q = Laplace(1,2)".into(),
        x_label: "alpha".into(),
        y_label: "bits".into(),
        series: vec![
            Series {
                name: "LB1".into(),
                points: rows.iter().map(|r| (r.alpha, Some(r.lb1))).collect(),
            },
            Series {
                name: "LB2".into(),
                points: rows.iter().map(|r| (r.alpha, Some(r.lb2))).collect(),
            },
            Series {
                name: "UB1".into(),
                points: rows.iter().map(|r| (r.alpha, Some(r.ub1))).collect(),
            },
        ],
    };
    let path = std::env::temp_dir().join("laplace_bounds.svg");
    std::fs::write(&path, chart.render())?;
    println!("wrote {}", path.display());
    Ok(())
}
