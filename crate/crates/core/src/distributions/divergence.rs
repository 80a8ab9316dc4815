//! Rényi and Kullback–Leibler divergences, reported in bits.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::pair::DistributionPair;
use super::scalar::{Point, ScalarDistribution};
use crate::error::{Error, Result};
use crate::numerics::{integrate_real_line, ln_add_exp, ln_sub_exp, log_sum_exp, QuadratureSpec};

/// A Rényi order `alpha > 0`, `alpha != 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Order(f64);

impl Order {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
            return Err(Error::OrderOutOfRange(alpha, "(0,1) or (1,inf)"));
        }
        Ok(Self(alpha))
    }

    /// An order in `(0, 1)`, the regime of the entropy and cost bounds.
    pub fn sub_unit(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OrderOutOfRange(alpha, "(0,1)"));
        }
        Ok(Self(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Campbell parameter `t = (1 - alpha) / alpha`.
    pub fn campbell_t(self) -> f64 {
        (1.0 - self.0) / self.0
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `D_order(P || Q)` in bits. Order 1 dispatches to [`kl_divergence`].
///
/// Gaussian and Laplace pairs use closed forms and finite pairs a direct sum;
/// an infinite divergence is returned as `f64::INFINITY`.
pub fn renyi_divergence(pair: &DistributionPair, order: f64) -> Result<f64> {
    if order == 1.0 {
        return kl_divergence(pair);
    }
    let alpha = Order::new(order)?.get();
    let nats = match (pair.p(), pair.q()) {
        (ScalarDistribution::Gaussian { mu: m1, sigma: s1 }, ScalarDistribution::Gaussian { mu: m2, sigma: s2 }) => {
            gaussian_renyi_nats(*m1, *s1, *m2, *s2, alpha)
        }
        (
            ScalarDistribution::Laplace { theta: t1, lambda: l1 },
            ScalarDistribution::Laplace { theta: t2, lambda: l2 },
        ) => laplace_renyi_nats(*t1, *l1, *t2, *l2, alpha),
        _ => finite_renyi_nats(pair.finite_p(), pair.finite_q(), alpha),
    };
    Ok(clean(nats) / LN_2)
}

/// `D(P || Q)` in bits.
pub fn kl_divergence(pair: &DistributionPair) -> Result<f64> {
    let nats = match (pair.p(), pair.q()) {
        (ScalarDistribution::Gaussian { mu: m1, sigma: s1 }, ScalarDistribution::Gaussian { mu: m2, sigma: s2 }) => {
            let d = m1 - m2;
            (s2 / s1).ln() + (s1 * s1 + d * d) / (2.0 * s2 * s2) - 0.5
        }
        (
            ScalarDistribution::Laplace { theta: t1, lambda: l1 },
            ScalarDistribution::Laplace { theta: t2, lambda: l2 },
        ) => {
            let d = (t1 - t2).abs();
            (l2 / l1).ln() + d / l2 + (l1 / l2) * (-d / l1).exp() - 1.0
        }
        _ => pair
            .finite_p()
            .iter()
            .zip(pair.finite_q())
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, q)| p * (p.ln() - q.ln()))
            .sum(),
    };
    Ok(clean(nats) / LN_2)
}

/// `D_order(P || Q)` in bits by quadrature of `p^order q^(1-order)`.
///
/// Intended as an independent cross-check of [`renyi_divergence`]. The
/// integrand is rescaled by its peak value so that tiny or huge integrals keep
/// full relative accuracy.
pub fn renyi_divergence_numeric(pair: &DistributionPair, order: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !pair.p().is_continuous() {
        return renyi_divergence(pair, order);
    }
    if order == 1.0 {
        let (a, b) = (pair.p().median(), pair.q().median());
        let kl = integrate_real_line(
            |x| {
                let x = Point::Real(x);
                let lp = pair.p().ln_density(x);
                if lp == f64::NEG_INFINITY {
                    0.0
                } else {
                    lp.exp() * pair.ln_ratio(x)
                }
            },
            &[a, b],
            spec,
        )?;
        return Ok(kl / LN_2);
    }
    let alpha = Order::new(order)?.get();
    let (p, q) = (pair.p(), pair.q());
    let (peak, width, mut breaks) = match (p, q) {
        (ScalarDistribution::Gaussian { mu: m1, sigma: s1 }, ScalarDistribution::Gaussian { mu: m2, sigma: s2 }) => {
            let (v1, v2) = (s1 * s1, s2 * s2);
            let star = alpha * v2 + (1.0 - alpha) * v1;
            if star <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let peak = (alpha * v2 * m1 + (1.0 - alpha) * v1 * m2) / star;
            let width = (v1 * v2 / star).sqrt();
            (peak, width, vec![*m1, *m2])
        }
        (
            ScalarDistribution::Laplace { theta: t1, lambda: l1 },
            ScalarDistribution::Laplace { theta: t2, lambda: l2 },
        ) => {
            if alpha * l2 + (1.0 - alpha) * l1 <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let h = |x: f64| log_integrand(pair, alpha, x);
            let peak = if h(*t1) >= h(*t2) { *t1 } else { *t2 };
            (peak, l1.min(*l2), vec![*t1, *t2])
        }
        _ => unreachable!("continuous pairs share a family"),
    };
    for k in [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0] {
        breaks.push(peak + k * width);
    }
    let shift = log_integrand(pair, alpha, peak);
    let scaled = QuadratureSpec {
        abs_tol: spec.abs_tol.min(1e-14),
        ..*spec
    };
    let integral = integrate_real_line(|x| (log_integrand(pair, alpha, x) - shift).exp(), &breaks, &scaled)?;
    let nats = (integral.ln() + shift) / (alpha - 1.0);
    Ok(clean(nats) / LN_2)
}

fn log_integrand(pair: &DistributionPair, alpha: f64, x: f64) -> f64 {
    let x = Point::Real(x);
    let lp = pair.p().ln_density(x);
    let lq = pair.q().ln_density(x);
    alpha * lp + (1.0 - alpha) * lq
}

fn clean(nats: f64) -> f64 {
    if nats.is_nan() {
        f64::INFINITY
    } else {
        nats
    }
}

fn gaussian_renyi_nats(m1: f64, s1: f64, m2: f64, s2: f64, alpha: f64) -> f64 {
    let (v1, v2) = (s1 * s1, s2 * s2);
    let star = alpha * v2 + (1.0 - alpha) * v1;
    if star <= 0.0 {
        return f64::INFINITY;
    }
    let d = m1 - m2;
    (s2 / s1).ln() + (v2 / star).ln() / (2.0 * (alpha - 1.0)) + alpha * d * d / (2.0 * star)
}

/// Closed form valid away from the removable singularity `alpha = l1/(l1+l2)`.
fn laplace_renyi_raw(t1: f64, l1: f64, t2: f64, l2: f64, alpha: f64) -> f64 {
    if alpha * l2 + (1.0 - alpha) * l1 <= 0.0 {
        return f64::INFINITY;
    }
    let d = (t1 - t2).abs();
    // g = (a/l1) e^{-(1-a)d/l2} - ((1-a)/l2) e^{-a d/l1}, kept in log form.
    let ln_a = (alpha / l1).ln() - (1.0 - alpha) * d / l2;
    let b_coef = (1.0 - alpha) / l2;
    let ln_b = b_coef.abs().ln() - alpha * d / l1;
    let ln_g = if b_coef < 0.0 {
        ln_add_exp(ln_a, ln_b)
    } else {
        ln_sub_exp(ln_a, ln_b).max(ln_sub_exp(ln_b, ln_a))
    };
    // denominator a^2 l2^2 - (1-a)^2 l1^2 = (a l2 - (1-a) l1)(a l2 + (1-a) l1)
    let den = ((alpha * l2 - (1.0 - alpha) * l1).abs() * (alpha * l2 + (1.0 - alpha) * l1)).ln();
    (l2 / l1).ln() + (l1.ln() + 2.0 * l2.ln() + ln_g - den) / (alpha - 1.0)
}

fn laplace_renyi_nats(t1: f64, l1: f64, t2: f64, l2: f64, alpha: f64) -> f64 {
    const STEP: f64 = 1e-6;
    let singular = l1 / (l1 + l2);
    if (alpha - singular).abs() < STEP {
        log::warn!(
            "Laplace divergence order {alpha} is at the removable singularity {singular}; \
             averaging the values at {singular} +/- {STEP}"
        );
        let lo = laplace_renyi_raw(t1, l1, t2, l2, singular - STEP);
        let hi = laplace_renyi_raw(t1, l1, t2, l2, singular + STEP);
        return 0.5 * (lo + hi);
    }
    laplace_renyi_raw(t1, l1, t2, l2, alpha)
}

fn finite_renyi_nats(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let ln_sum = log_sum_exp(
        p.iter()
            .zip(q)
            .filter(|(pi, qi)| **pi > 0.0 && **qi > 0.0)
            .map(|(pi, qi)| alpha * pi.ln() + (1.0 - alpha) * qi.ln()),
    );
    ln_sum / (alpha - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(mu: f64, s: f64) -> ScalarDistribution {
        ScalarDistribution::gaussian(mu, s).unwrap()
    }

    fn laplace(t: f64, l: f64) -> ScalarDistribution {
        ScalarDistribution::laplace(t, l).unwrap()
    }

    fn pair(p: ScalarDistribution, q: ScalarDistribution) -> DistributionPair {
        DistributionPair::new(p, q).unwrap()
    }

    #[test]
    fn identical_pairs_have_zero_divergence() {
        for pr in [
            pair(normal(0.3, 2.0), normal(0.3, 2.0)),
            pair(laplace(-1.0, 0.5), laplace(-1.0, 0.5)),
            pair(
                ScalarDistribution::finite(vec![0.2, 0.8]).unwrap(),
                ScalarDistribution::finite(vec![0.2, 0.8]).unwrap(),
            ),
        ] {
            assert!(renyi_divergence(&pr, 0.5).unwrap().abs() < 1e-12);
            assert!(kl_divergence(&pr).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_order_two() {
        let pr = pair(normal(0.0, 1.0), normal(1.0, 1.0));
        assert!((renyi_divergence(&pr, 2.0).unwrap() - 1.0 / LN_2).abs() < 1e-12);
    }

    #[test]
    fn gaussian_kl() {
        let pr = pair(normal(0.0, 1.0), normal(5.0, 1.0));
        assert!((kl_divergence(&pr).unwrap() - 12.5 / LN_2).abs() < 1e-12);
    }

    #[test]
    fn gaussian_variance_blowup() {
        // alpha sigma2^2 + (1 - alpha) sigma1^2 = 2 - 4 < 0
        let pr = pair(normal(0.0, 2.0), normal(0.0, 1.0));
        assert_eq!(renyi_divergence(&pr, 2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn laplace_infinite_branch() {
        let pr = pair(laplace(0.0, 3.0), laplace(0.0, 1.0));
        assert_eq!(renyi_divergence(&pr, 2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn finite_kl() {
        let pr = pair(
            ScalarDistribution::finite(vec![0.5, 0.5]).unwrap(),
            ScalarDistribution::finite(vec![0.25, 0.75]).unwrap(),
        );
        let expect = 0.5 * 1.0 + 0.5 * (2.0f64 / 3.0).log2();
        assert!((kl_divergence(&pr).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn laplace_singularity_is_smoothed() {
        let pr = pair(laplace(0.0, 1.0), laplace(2.0, 3.0));
        let at = renyi_divergence(&pr, 0.25).unwrap();
        let near = renyi_divergence(&pr, 0.25 + 1e-4).unwrap();
        assert!(at.is_finite());
        assert!((at - near).abs() < 1e-3, "{at} vs {near}");
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let spec = QuadratureSpec::default();
        let pairs = [
            pair(normal(0.0, 1.0), normal(1.0, 1.0)),
            pair(normal(0.0, 1.0), normal(5.0, 1.0)),
            pair(normal(0.5, 0.8), normal(-1.0, 1.5)),
            pair(laplace(0.0, 1.0), laplace(5.0, 1.0)),
            pair(laplace(0.0, 1.0), laplace(1.0, 2.0)),
        ];
        for pr in &pairs {
            for order in [0.3, 0.5, 1.5, 2.0, 3.0] {
                let closed = renyi_divergence(pr, order).unwrap();
                if !closed.is_finite() || closed > 60.0 {
                    continue;
                }
                let numeric = renyi_divergence_numeric(pr, order, &spec).unwrap();
                assert!(
                    (closed - numeric).abs() < 1e-6,
                    "{pr:?} order {order}: {closed} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn order_validation() {
        assert!(Order::new(0.0).is_err());
        assert!(Order::new(1.0).is_err());
        assert!(Order::sub_unit(1.5).is_err());
        assert!((Order::new(0.5).unwrap().campbell_t() - 1.0).abs() < 1e-15);
    }
}
