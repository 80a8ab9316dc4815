use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
}

impl GofResult {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// One-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction of the Kolmogorov distribution).
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<GofResult> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut xs = samples.to_vec();
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("NaN sample".into()));
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    Ok(GofResult {
        statistic: d,
        p_value: kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d),
    })
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Pearson chi-square test of `counts` against cell probabilities `probs`.
/// Cells with expected count below 5 are pooled; zero-probability cells must
/// be empty.
pub fn chi_square_test(counts: &[u64], probs: &[f64]) -> Result<GofResult> {
    if counts.len() != probs.len() {
        return Err(Error::InvalidParameter("counts and probs differ in length".into()));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let n = n as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let expected = n * p;
        if p == 0.0 {
            if c > 0 {
                return Ok(GofResult {
                    statistic: f64::INFINITY,
                    p_value: 0.0,
                });
            }
            continue;
        }
        if expected < 5.0 {
            pooled_obs += c as f64;
            pooled_exp += expected;
            continue;
        }
        stat += (c as f64 - expected).powi(2) / expected;
        cells += 1;
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    if cells < 2 {
        return Ok(GofResult {
            statistic: stat,
            p_value: 1.0,
        });
    }
    let df = (cells - 1) as f64;
    Ok(GofResult {
        statistic: stat,
        p_value: gamma_ur(df / 2.0, stat / 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_cdf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn kolmogorov_quantiles() {
        // standard critical values: 1.358 at 5%, 1.628 at 1%
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn ks_accepts_and_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..20_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(ks_test(&xs, std_normal_cdf).unwrap().passes(0.01));
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.05).collect();
        assert!(!ks_test(&shifted, std_normal_cdf).unwrap().passes(0.01));
    }

    #[test]
    fn chi_square_values() {
        // statistic 4 on 1 degree of freedom: p = 0.0455
        let r = chi_square_test(&[60, 40], &[0.5, 0.5]).unwrap();
        assert!((r.statistic - 4.0).abs() < 1e-12);
        assert!((r.p_value - 0.045_500_263_896_358_4).abs() < 1e-9);
        assert_eq!(chi_square_test(&[1, 1], &[1.0, 0.0]).unwrap().p_value, 0.0);
    }
}
