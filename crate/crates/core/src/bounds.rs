//! Lower and upper bounds on the Campbell cost of the PFR index, in bits.

use std::f64::consts::{LN_2, LOG2_E};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{kl_divergence, renyi_divergence, DistributionPair};
use crate::error::{Error, Result};
use crate::numerics::{log_gamma, minimize_scalar, MinimizeSpec};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OrderOutOfRange(alpha, "(0,1)"));
    }
    Ok(())
}

/// `LB1 = D_{1/alpha}(P||Q) + (alpha/(1-alpha)) log alpha - 1`.
pub fn lb1(pair: &DistributionPair, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let d = renyi_divergence(pair, 1.0 / alpha)?;
    Ok(d + alpha / (1.0 - alpha) * alpha.log2() - 1.0)
}

/// `LB2 = D_{2-alpha}(P||Q) + (1/(1-alpha)) log(1/(2-alpha))`.
pub fn lb2(pair: &DistributionPair, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let d = renyi_divergence(pair, 2.0 - alpha)?;
    Ok(d - (2.0 - alpha).log2() / (1.0 - alpha))
}

/// Constant of the first upper bound.
pub fn c1(alpha: f64, epsilon: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_epsilon(epsilon, f64::INFINITY)?;
    let tail = (1.0 + 1.0 / epsilon).log2();
    if alpha > 0.5 && epsilon < (2.0 * alpha - 1.0) / (1.0 - alpha) {
        Ok((1.0 + epsilon) * LOG2_E + 1.0 + tail)
    } else {
        let r = alpha / (1.0 - alpha);
        let lg = log_gamma((1.0 + epsilon * (1.0 - alpha)) / alpha)? / LN_2;
        Ok(r * lg + 4.0 + 3.0 * epsilon - 2.0 * r + tail)
    }
}

/// Which form of the second upper bound's constant to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C2Variant {
    /// `3 + eps + log(ln 2 / eps + 3/2)`.
    #[default]
    Conservative,
    /// `2 + eps + log(ln 2 / eps + 3/2)`, one bit smaller.
    Sharp,
}

pub fn c2(epsilon: f64, variant: C2Variant) -> Result<f64> {
    check_epsilon(epsilon, f64::INFINITY)?;
    let lead = match variant {
        C2Variant::Conservative => 3.0,
        C2Variant::Sharp => 2.0,
    };
    Ok(lead + epsilon + (LN_2 / epsilon + 1.5).log2())
}

fn check_epsilon(epsilon: f64, max: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= max) {
        return Err(Error::EpsilonOutOfRange { epsilon, max });
    }
    Ok(())
}

/// Order of the divergence in the first upper bound, `(1 + eps(1-alpha))/alpha`.
pub fn ub1_order(alpha: f64, epsilon: f64) -> f64 {
    (1.0 + epsilon * (1.0 - alpha)) / alpha
}

/// `UB1 = (1 + eps) D_{(1+eps(1-alpha))/alpha}(P||Q) + c1(alpha, eps)`.
pub fn ub1(pair: &DistributionPair, alpha: f64, epsilon: f64) -> Result<f64> {
    ub1_shifted(pair, alpha, epsilon, 0.0)
}

fn ub1_shifted(pair: &DistributionPair, alpha: f64, epsilon: f64, c1_shift: f64) -> Result<f64> {
    let c = c1(alpha, epsilon)? + c1_shift;
    let d = renyi_divergence(pair, ub1_order(alpha, epsilon))?;
    Ok((1.0 + epsilon) * d + c)
}

/// Largest admissible slack of the second upper bound, `(3 alpha - 2)/(2 - 2 alpha)`.
pub fn ub2_epsilon_max(alpha: f64) -> f64 {
    (3.0 * alpha - 2.0) / (2.0 - 2.0 * alpha)
}

/// `UB2 = D_{(2-alpha)/alpha}(P||Q) + (1 + eps) log(D(P||Q) + 1) + c2(eps)`,
/// defined for `2/3 < alpha < 1` and `0 < eps <= (3 alpha - 2)/(2 - 2 alpha)`.
pub fn ub2(pair: &DistributionPair, alpha: f64, epsilon: f64, variant: C2Variant) -> Result<f64> {
    if !(alpha > 2.0 / 3.0 && alpha < 1.0) {
        return Err(Error::OrderOutOfRange(alpha, "(2/3,1)"));
    }
    check_epsilon(epsilon, ub2_epsilon_max(alpha))?;
    let d = renyi_divergence(pair, (2.0 - alpha) / alpha)?;
    let kl = kl_divergence(pair)?;
    Ok(d + (1.0 + epsilon) * (kl + 1.0).log2() + c2(epsilon, variant)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpperBound {
    Ub1,
    Ub2,
}

/// Knobs shared by [`optimize_ub_with`] and [`sweep_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundOptions {
    pub c2: C2Variant,
    /// Added to `c1`; nonzero only to exercise the verification suite.
    #[serde(default)]
    pub c1_shift: f64,
}

/// Minimizes the chosen upper bound over `eps`, returning `(eps, value)`.
pub fn optimize_ub(pair: &DistributionPair, alpha: f64, which: UpperBound, spec: &MinimizeSpec) -> Result<(f64, f64)> {
    optimize_ub_with(pair, alpha, which, spec, &BoundOptions::default())
}

pub fn optimize_ub_with(
    pair: &DistributionPair,
    alpha: f64,
    which: UpperBound,
    spec: &MinimizeSpec,
    options: &BoundOptions,
) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    match which {
        UpperBound::Ub1 => {
            // Validate once so the objective can treat errors as impossible.
            ub1_shifted(pair, alpha, spec.lo, options.c1_shift)?;
            minimize_scalar(
                |e| ub1_shifted(pair, alpha, e, options.c1_shift).unwrap_or(f64::NAN),
                spec,
            )
        }
        UpperBound::Ub2 => {
            let hi = spec.hi.min(ub2_epsilon_max(alpha));
            let lo = spec.lo.min(hi / 10.0);
            let local = MinimizeSpec { lo, hi, ..*spec };
            ub2(pair, alpha, hi, options.c2)?;
            minimize_scalar(|e| ub2(pair, alpha, e, options.c2).unwrap_or(f64::NAN), &local)
        }
    }
}

/// All four bounds at one order, with the optimizing slacks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub alpha: f64,
    pub lb1: f64,
    pub lb2: f64,
    pub ub1: f64,
    pub ub1_eps: f64,
    pub ub2: Option<f64>,
    pub ub2_eps: Option<f64>,
}

impl BoundSet {
    pub fn lb_max(&self) -> f64 {
        self.lb1.max(self.lb2)
    }
}

/// `points` equally spaced orders from `lo` to `hi` inclusive, rounded to 12
/// decimals so that grid values print cleanly.
pub fn alpha_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(0.0 < lo && lo < hi && hi < 1.0) || points < 2 {
        return Err(Error::InvalidParameter(format!("alpha grid ({lo}, {hi}, {points})")));
    }
    Ok((0..points)
        .map(|i| {
            let a = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (a * 1e12).round() / 1e12
        })
        .collect())
}

/// Default grid for Gaussian pairs: 160 points on `[0.2, 0.995]`.
pub fn gaussian_alpha_grid() -> Vec<f64> {
    alpha_grid(0.2, 0.995, 160).expect("static grid")
}

/// Default grid for Laplace pairs: 160 points on `[0.05, 0.995]`.
pub fn laplace_alpha_grid() -> Vec<f64> {
    alpha_grid(0.05, 0.995, 160).expect("static grid")
}

pub fn bound_set(pair: &DistributionPair, alpha: f64, spec: &MinimizeSpec, options: &BoundOptions) -> Result<BoundSet> {
    let (ub1_eps, ub1) = optimize_ub_with(pair, alpha, UpperBound::Ub1, spec, options)?;
    let (ub2_eps, ub2) = if alpha > 2.0 / 3.0 {
        let (e, v) = optimize_ub_with(pair, alpha, UpperBound::Ub2, spec, options)?;
        (Some(e), Some(v))
    } else {
        (None, None)
    };
    Ok(BoundSet {
        alpha,
        lb1: lb1(pair, alpha)?,
        lb2: lb2(pair, alpha)?,
        ub1,
        ub1_eps,
        ub2,
        ub2_eps,
    })
}

/// One [`BoundSet`] per order, sorted by `alpha`. Rows are computed in
/// parallel; the result does not depend on scheduling.
pub fn sweep(pair: &DistributionPair, alphas: &[f64], spec: &MinimizeSpec) -> Result<Vec<BoundSet>> {
    sweep_with(pair, alphas, spec, &BoundOptions::default())
}

pub fn sweep_with(
    pair: &DistributionPair,
    alphas: &[f64],
    spec: &MinimizeSpec,
    options: &BoundOptions,
) -> Result<Vec<BoundSet>> {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.par_iter().map(|&a| bound_set(pair, a, spec, options)).collect()
}

/// CSV cell: shortest round-trip decimal, `inf` for infinities, empty for `None`.
pub fn csv_cell(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x == f64::INFINITY => "inf".into(),
        Some(x) if x == f64::NEG_INFINITY => "-inf".into(),
        Some(x) => format!("{x}"),
    }
}

pub const SWEEP_HEADER: &str = "alpha,lb1,lb2,lb_max,ub1,ub1_eps,ub2,ub2_eps";

/// Sweep rows as CSV with header [`SWEEP_HEADER`].
pub fn sweep_csv(rows: &[BoundSet]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{}", sweep_row(r));
    }
    out
}

pub(crate) fn sweep_row(r: &BoundSet) -> String {
    [
        Some(r.alpha),
        Some(r.lb1),
        Some(r.lb2),
        Some(r.lb_max()),
        Some(r.ub1),
        Some(r.ub1_eps),
        r.ub2,
        r.ub2_eps,
    ]
    .iter()
    .map(|v| csv_cell(*v))
    .collect::<Vec<_>>()
    .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(p: &str, q: &str) -> DistributionPair {
        DistributionPair::new(p.parse().unwrap(), q.parse().unwrap()).unwrap()
    }

    #[test]
    fn lower_bounds_at_zero_divergence() {
        let same = pair("normal:0,1", "normal:0,1");
        assert!((lb1(&same, 0.5).unwrap() + 2.0).abs() < 1e-12);
        assert!((lb2(&same, 0.5).unwrap() - 2.0 * (1.0f64 / 1.5).log2()).abs() < 1e-12);
    }

    #[test]
    fn lower_bounds_shifted_gaussian() {
        let p = pair("normal:0,1", "normal:5,1");
        assert!((lb1(&p, 0.5).unwrap() - (25.0 / LN_2 - 2.0)).abs() < 1e-9);
        assert!((lb2(&p, 0.5).unwrap() - (18.75 / LN_2 + 2.0 * (1.0f64 / 1.5).log2())).abs() < 1e-9);
    }

    #[test]
    fn lb1_constant_limit() {
        let same = pair("normal:0,1", "normal:0,1");
        let v = lb1(&same, 1.0 - 1e-7).unwrap();
        assert!((v - (-1.0 / LN_2 - 1.0)).abs() < 1e-5);
    }

    #[test]
    fn lb2_recovers_kl_bound() {
        let p = pair("normal:0,1", "normal:1,1");
        let kl = kl_divergence(&p).unwrap();
        assert!((lb2(&p, 0.999).unwrap() - (kl - 1.0 / LN_2)).abs() < 0.01);
    }

    #[test]
    fn c1_cases() {
        let v = c1(0.8, 0.1).unwrap();
        assert!((v - (1.1 * LOG2_E + 1.0 + 11f64.log2())).abs() < 1e-12);
        assert!((v - 6.046).abs() < 1e-3);
        // alpha < 1/2 and the inclusive boundary eps = (2 alpha - 1)/(1 - alpha) take the Gamma branch
        let gamma_branch = |a: f64, e: f64| {
            let r = a / (1.0 - a);
            r * log_gamma((1.0 + e * (1.0 - a)) / a).unwrap() / LN_2 + 4.0 + 3.0 * e - 2.0 * r + (1.0 + 1.0 / e).log2()
        };
        assert!((c1(0.4, 0.1).unwrap() - gamma_branch(0.4, 0.1)).abs() < 1e-12);
        let boundary = (2.0 * 0.8 - 1.0) / (1.0 - 0.8);
        assert!((c1(0.8, boundary).unwrap() - gamma_branch(0.8, boundary)).abs() < 1e-12);
        assert!(c1(1.0, 0.1).is_err());
    }

    #[test]
    fn c2_values() {
        assert!((c2(1.0, C2Variant::Conservative).unwrap() - (4.0 + (LN_2 + 1.5).log2())).abs() < 1e-12);
        assert!((c2(1.0, C2Variant::Conservative).unwrap() - 5.133).abs() < 1e-3);
        assert_eq!(
            c2(0.3, C2Variant::Conservative).unwrap() - c2(0.3, C2Variant::Sharp).unwrap(),
            1.0
        );
    }

    #[test]
    fn ub_identities() {
        let same = pair("normal:0,1", "normal:0,1");
        assert!((ub1(&same, 0.8, 0.1).unwrap() - c1(0.8, 0.1).unwrap()).abs() < 1e-12);
        assert!(
            (ub2(&same, 0.9, 0.1, C2Variant::Conservative).unwrap() - c2(0.1, C2Variant::Conservative).unwrap()).abs()
                < 1e-12
        );
        assert!((ub1_order(0.5, 0.2) - 2.2).abs() < 1e-15);
        assert!((ub2_epsilon_max(0.7) - 1.0 / 6.0).abs() < 1e-12);
        assert!(matches!(
            ub2(&same, 0.7, 0.2, C2Variant::Conservative),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        assert!(ub2(&same, 0.6, 0.01, C2Variant::Conservative).is_err());
    }

    #[test]
    fn optimization_respects_constraints() {
        let p = pair("normal:0,1", "normal:1,1");
        let spec = MinimizeSpec::default();
        let (e2, v2) = optimize_ub(&p, 0.9, UpperBound::Ub2, &spec).unwrap();
        assert!(e2 <= ub2_epsilon_max(0.9));
        let (_, v1) = optimize_ub(&p, 0.9, UpperBound::Ub1, &spec).unwrap();
        assert!(v1 < v2);
        let same = pair("normal:0,1", "normal:0,1");
        let (_, v) = optimize_ub(&same, 0.9, UpperBound::Ub1, &spec).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn sweep_rows_and_csv() {
        let same = pair("normal:0,1", "normal:0,1");
        let rows = sweep(&same, &[0.9, 0.5], &MinimizeSpec::default()).unwrap();
        assert_eq!(rows[0].alpha, 0.5);
        assert!(rows[0].lb1 < 0.0 && rows[0].lb2 < 0.0);
        assert!(rows[0].ub2.is_none() && rows[1].ub2.is_some());
        let csv = sweep_csv(&rows);
        let first = csv.lines().nth(1).unwrap();
        assert!(first.ends_with(",,"), "{first}");
        assert_eq!(csv_cell(Some(f64::INFINITY)), "inf");
    }

    #[test]
    fn grids() {
        let g = gaussian_alpha_grid();
        assert_eq!(g.len(), 160);
        assert_eq!(g[0], 0.2);
        assert!((g[159] - 0.995).abs() < 1e-15);
        assert!(alpha_grid(0.5, 0.4, 10).is_err());
    }
}
