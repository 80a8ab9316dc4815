use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{lb1, lb2};
use crate::codes::{campbell_cost, LengthFunction};
use crate::distributions::{kl_divergence, renyi_divergence, DistributionPair};
use crate::error::{Error, Result};
use crate::numerics::{log_gamma, QuadratureSpec};
use crate::pfr::{index_pmf, sample_index_exact, IndexPmf};

/// Sample mean and its standard error.
pub(crate) fn mean_and_se<I: ExactSizeIterator<Item = f64> + Clone>(xs: I) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of `E[K^alpha]` against the band
/// `(1/(1+alpha)) 2^{alpha D_{alpha+1}} <= E[K^alpha] <= 2^{alpha D_{alpha+1}} + alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub alpha: f64,
    pub empirical_moment: f64,
    pub band_lower: f64,
    pub band_upper: f64,
    pub n_samples: u64,
    pub std_error: f64,
}

impl MomentReport {
    pub fn band_nonempty(&self) -> bool {
        self.band_lower <= self.band_upper
    }

    pub fn passed(&self) -> bool {
        let margin = 3.0 * self.std_error;
        self.band_nonempty()
            && self.band_lower - margin <= self.empirical_moment
            && self.empirical_moment <= self.band_upper + margin
    }
}

fn moment_band(pair: &DistributionPair, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OrderOutOfRange(alpha, "(0,1)"));
    }
    let scale = (alpha * renyi_divergence(pair, alpha + 1.0)?).exp2();
    Ok((scale / (1.0 + alpha), scale + alpha))
}

/// Builds a [`MomentReport`] from indices already drawn from the PFR law.
pub fn moment_report(pair: &DistributionPair, alpha: f64, indices: &[u64]) -> Result<MomentReport> {
    mapped_moment_report(pair, alpha, indices, |k| k)
}

fn mapped_moment_report<G: Fn(u64) -> u64>(
    pair: &DistributionPair,
    alpha: f64,
    indices: &[u64],
    g: G,
) -> Result<MomentReport> {
    if indices.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let (band_lower, band_upper) = moment_band(pair, alpha)?;
    let (mean, se) = mean_and_se(indices.iter().map(|&k| (g(k) as f64).powf(alpha)));
    Ok(MomentReport {
        alpha,
        empirical_moment: mean,
        band_lower,
        band_upper,
        n_samples: indices.len() as u64,
        std_error: se,
    })
}

/// Draws `n_samples` indices with [`sample_index_exact`] and checks the moment band.
pub fn verify_moment_bounds<R: Rng + ?Sized>(
    pair: &DistributionPair,
    alpha: f64,
    n_samples: u64,
    rng: &mut R,
) -> Result<MomentReport> {
    let ks = draw_indices(pair, n_samples, rng)?;
    moment_report(pair, alpha, &ks)
}

fn draw_indices<R: Rng + ?Sized>(pair: &DistributionPair, n: u64, rng: &mut R) -> Result<Vec<u64>> {
    let spec = QuadratureSpec::default();
    (0..n)
        .map(|_| sample_index_exact(pair, rng, &spec).map(|o| o.index))
        .collect()
}

/// Lower half of the moment band for `E[g(K)^alpha]`, where `g` permutes the
/// first `span` indices at random and fixes the rest.
pub fn bijection_report(
    pair: &DistributionPair,
    alpha: f64,
    indices: &[u64],
    span: usize,
    seed: u64,
) -> Result<MomentReport> {
    let mut perm: Vec<u64> = (1..=span as u64).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    mapped_moment_report(pair, alpha, indices, |k| {
        usize::try_from(k - 1)
            .ok()
            .and_then(|i| perm.get(i))
            .copied()
            .unwrap_or(k)
    })
}

/// Empirical `E[log K]` in bits against `D(P||Q) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMomentReport {
    pub empirical: f64,
    pub bound: f64,
    pub n_samples: u64,
    pub std_error: f64,
}

impl LogMomentReport {
    pub fn passed(&self) -> bool {
        self.empirical <= self.bound + 3.0 * self.std_error
    }
}

pub fn log_moment_report(pair: &DistributionPair, indices: &[u64]) -> Result<LogMomentReport> {
    if indices.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let (mean, se) = mean_and_se(indices.iter().map(|&k| (k as f64).log2()));
    Ok(LogMomentReport {
        empirical: mean,
        bound: kl_divergence(pair)? + 1.0,
        n_samples: indices.len() as u64,
        std_error: se,
    })
}

pub fn verify_log_moment<R: Rng + ?Sized>(
    pair: &DistributionPair,
    n_samples: u64,
    rng: &mut R,
) -> Result<LogMomentReport> {
    let ks = draw_indices(pair, n_samples, rng)?;
    log_moment_report(pair, &ks)
}

/// `E[X^r]` of a geometric law, by direct summation plus a ratio-test tail
/// bound, against `2^{r-1}(Gamma(r+1)/p^r + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricReport {
    pub p: f64,
    pub r: f64,
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub bound: f64,
}

impl GeometricReport {
    pub fn value(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }

    pub fn passed(&self) -> bool {
        self.value() <= self.bound
    }
}

pub fn verify_geometric_moment(p: f64, r: f64, n_terms: u64) -> Result<GeometricReport> {
    if !(p > 0.0 && p < 1.0) || !(r >= 1.0) || n_terms == 0 {
        return Err(Error::InvalidParameter(format!(
            "geometric moment p = {p}, r = {r}, n = {n_terms}"
        )));
    }
    let ln_q = (-p).ln_1p();
    let ln_term = |k: f64| r * k.ln() + p.ln() + (k - 1.0) * ln_q;
    let partial_sum: f64 = (1..=n_terms).map(|k| ln_term(k as f64).exp()).sum();
    // successive-term ratio (1 + 1/k)^r q is decreasing in k
    let n1 = (n_terms + 1) as f64;
    let rho = (r * (1.0 / n1).ln_1p() + ln_q).exp();
    let tail_bound = if rho < 1.0 {
        ln_term(n1).exp() / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    let bound = (r - 1.0).exp2() * ((log_gamma(r + 1.0)? - r * p.ln()).exp() + 1.0);
    Ok(GeometricReport {
        p,
        r,
        partial_sum,
        tail_bound,
        bound,
    })
}

/// `L(t)` of one code on the sorted exact pmf against `max(LB1, LB2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodeBoundReport {
    pub alpha: f64,
    pub code: String,
    pub cost: f64,
    pub lower_bound: f64,
}

impl CodeBoundReport {
    pub fn passed(&self) -> bool {
        self.cost >= self.lower_bound - 1e-9
    }
}

/// Largest support accepted by [`verify_lb_via_optimal_code`].
pub const MAX_CODE_SUPPORT: usize = 12;

/// Exact index pmf of a small finite pair, truncated where the tail drops
/// below `1e-15` and sorted nonincreasing.
pub fn sorted_exact_pmf(pair: &DistributionPair) -> Result<IndexPmf> {
    let spec = QuadratureSpec::default();
    let mut n = 1024usize;
    loop {
        let pmf = index_pmf(pair, n, &spec)?;
        if pmf.tail_mass() < 1e-15 || n >= 1 << 22 {
            let mut probs = pmf.probs().to_vec();
            probs.sort_by(|a, b| b.total_cmp(a));
            return IndexPmf::new(probs, pmf.tail_mass());
        }
        n *= 4;
    }
}

/// Evaluates `L(t)`, `t = (1-alpha)/alpha`, on the sorted exact pmf under the
/// optimal one-to-one lengths and under power-law and universal codes.
pub fn verify_lb_via_optimal_code(pair: &DistributionPair, alphas: &[f64]) -> Result<Vec<CodeBoundReport>> {
    let support = match pair.p() {
        crate::distributions::ScalarDistribution::Finite { probs } => probs.len(),
        _ => return Err(Error::UnsupportedKind("continuous pair in exact code check")),
    };
    if support > MAX_CODE_SUPPORT {
        return Err(Error::InvalidParameter(format!(
            "support {support} > {MAX_CODE_SUPPORT}"
        )));
    }
    let pmf = sorted_exact_pmf(pair)?;
    let codes = [
        LengthFunction::OneToOne,
        LengthFunction::power_law(1.0)?,
        LengthFunction::universal(1.0)?,
    ];
    let mut out = Vec::new();
    for &alpha in alphas {
        let t = (1.0 - alpha) / alpha;
        let (l1, l2) = (lb1(pair, alpha)?, lb2(pair, alpha)?);
        for code in &codes {
            let cost = campbell_cost(&pmf, code, t, Some(0.0))?.lower;
            out.push(CodeBoundReport {
                alpha,
                code: code.to_string(),
                cost,
                lower_bound: l1.max(l2),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(p: &str, q: &str) -> DistributionPair {
        DistributionPair::new(p.parse().unwrap(), q.parse().unwrap()).unwrap()
    }

    #[test]
    fn identical_pair_moments() {
        let pr = pair("finite:0.3,0.7", "finite:0.3,0.7");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = verify_moment_bounds(&pr, 0.4, 100, &mut rng).unwrap();
        assert_eq!(r.empirical_moment, 1.0);
        assert!((r.band_lower - 1.0 / 1.4).abs() < 1e-12);
        assert!((r.band_upper - 1.4).abs() < 1e-12);
        assert!(r.passed());
        let l = verify_log_moment(&pr, 100, &mut rng).unwrap();
        assert_eq!(l.empirical, 0.0);
        assert!((l.bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_pair_moments() {
        let pr = pair("finite:0.9,0.1", "finite:0.5,0.5");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(verify_moment_bounds(&pr, 0.5, 20_000, &mut rng).unwrap().passed());
    }

    #[test]
    fn geometric_examples() {
        let r = verify_geometric_moment(0.5, 1.0, 200).unwrap();
        assert!((r.value() - 2.0).abs() < 1e-12);
        assert!((r.bound - 3.0).abs() < 1e-12);
        let r = verify_geometric_moment(0.5, 2.0, 200).unwrap();
        assert!((r.value() - 6.0).abs() < 1e-10);
        assert!((r.bound - 18.0).abs() < 1e-10);
        assert!(verify_geometric_moment(0.1, 2.5, 2000).unwrap().passed());
        assert!(verify_geometric_moment(0.5, 0.5, 10).is_err());
    }

    #[test]
    fn tail_bound_dominates_truncation() {
        let full = verify_geometric_moment(0.3, 3.0, 5000).unwrap();
        let short = verify_geometric_moment(0.3, 3.0, 40).unwrap();
        assert!(short.value() >= full.partial_sum);
        assert!(short.tail_bound.is_finite());
    }

    #[test]
    fn optimal_code_respects_lower_bounds() {
        for (p, q) in [
            ("finite:0.5,0.5", "finite:0.5,0.5"),
            ("finite:0.9,0.1", "finite:0.5,0.5"),
            ("finite:0.99,0.01", "finite:0.01,0.99"),
        ] {
            let reports = verify_lb_via_optimal_code(&pair(p, q), &[0.3, 0.5, 0.7, 0.9]).unwrap();
            for r in reports {
                assert!(r.passed(), "{p} {q} {r:?}");
            }
        }
    }

    #[test]
    fn bijection_identity_matches_moment() {
        let pr = pair("finite:0.9,0.1", "finite:0.5,0.5");
        let ks = [1, 1, 2, 5, 3];
        let id = moment_report(&pr, 0.5, &ks).unwrap();
        let span_one = bijection_report(&pr, 0.5, &ks, 1, 7).unwrap();
        assert_eq!(id, span_one);
    }
}
