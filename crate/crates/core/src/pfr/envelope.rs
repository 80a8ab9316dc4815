//! Upper envelope of the index pmf beyond the truncation point.
//!
//! `P(K = k)` is nonincreasing in `k`, so on a geometric ladder of knots
//! `N = k_0 < k_1 < ...` every term in `(k_j, k_{j+1}]` is at most `P(K = k_j)`.
//! Past the last knot `M` the remaining sum `sum_{k > M} P(K = k)^alpha` is
//! bounded by Hölder's inequality with a tail moment `E[K^s; K > M]`.

use rayon::prelude::*;

use super::beta::{beta_value, BetaMethod, BetaValue};
use super::pmf::ratio_breakpoints;
use crate::distributions::{DistributionPair, Point, ScalarDistribution};
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_error, ln_add_exp, log_gamma, log_sum_exp, QuadratureSpec};

const MOMENT_ORDERS: [f64; 13] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0];
/// Relative inflation applied to every quadrature value so the envelope stays
/// above the true pmf despite integration error.
const INFLATE: f64 = 1e-6;
const SCAN_POINTS: usize = 8001;

/// Settings for [`TailEnvelope::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeOptions {
    /// Knot ratio `k_{j+1} / k_j` below `1e8`; it widens further out.
    pub ratio: f64,
    /// Smallest order the envelope must serve accurately.
    pub alpha_min: f64,
    /// Stop once the Hölder remainder at `alpha_min` is below this.
    pub target: f64,
    pub max_k: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self {
            ratio: 1.02,
            alpha_min: 0.05,
            target: 1e-12,
            max_k: 1e300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailEnvelope {
    /// `(k_j, ln of an upper bound on P(K = k_j))`.
    knots: Vec<(f64, f64)>,
    /// `(s, ln of an upper bound on E[K^s; K > M])` at the last knot `M`.
    moments: Vec<(f64, f64)>,
    ln_tail_last: f64,
}

/// Precomputed `ln p(u)` and `beta(u)` on a uniform scan grid.
struct Scan<'a> {
    pair: &'a DistributionPair,
    xs: Vec<f64>,
    ln_p: Vec<f64>,
    betas: Vec<BetaValue>,
    lo: f64,
    hi: f64,
    ln_outside: f64,
    breaks: Vec<f64>,
}

impl<'a> Scan<'a> {
    fn new(pair: &'a DistributionPair) -> Result<Self> {
        let (lo, hi) = match pair.p() {
            ScalarDistribution::Gaussian { mu, sigma } => (mu - 40.0 * sigma, mu + 40.0 * sigma),
            ScalarDistribution::Laplace { theta, lambda } => (theta - 700.0 * lambda, theta + 700.0 * lambda),
            ScalarDistribution::Finite { .. } => unreachable!("finite pairs need no envelope"),
        };
        let xs: Vec<f64> = (0..SCAN_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
            .collect();
        let ln_p = xs.iter().map(|&x| pair.p().ln_density(Point::Real(x))).collect();
        let spec = QuadratureSpec::default();
        let betas = xs
            .par_iter()
            .map(|&x| beta_value(pair, Point::Real(x), BetaMethod::Auto, &spec))
            .collect::<Result<_>>()?;
        let ln_outside = ln_add_exp(
            pair.p().ln_interval_prob(f64::NEG_INFINITY, lo),
            pair.p().ln_interval_prob(hi, f64::INFINITY),
        );
        let breaks = ratio_breakpoints(pair)
            .into_iter()
            .filter(|b| *b > lo && *b < hi)
            .collect();
        Ok(Self {
            pair,
            xs,
            ln_p,
            betas,
            lo,
            hi,
            ln_outside,
            breaks,
        })
    }

    /// `ln of the integral of exp(f(ln p(u), beta(u)))` over `[lo, hi]`.
    fn ln_integral<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64, &BetaValue) -> f64,
    {
        let values: Vec<f64> = self.ln_p.iter().zip(&self.betas).map(|(lp, b)| f(*lp, b)).collect();
        let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Ok(peak);
        }
        if peak.is_nan() {
            return Err(Error::NonFinite {
                at: f64::NAN,
                value: peak,
            });
        }
        let step = self.xs[1] - self.xs[0];
        let mut edges = vec![self.lo, self.hi];
        edges.extend(self.breaks.iter().copied());
        for i in 1..values.len() - 1 {
            let local_max = values[i] >= values[i - 1] && values[i] >= values[i + 1];
            if local_max && values[i] > peak - 40.0 {
                edges.push((self.xs[i] - step).max(self.lo));
                edges.push((self.xs[i] + step).min(self.hi));
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let spec = QuadratureSpec {
            abs_tol: 1e-15,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        };
        let spec_ref = &spec;
        let g = |x: f64| -> f64 {
            let u = Point::Real(x);
            let lp = self.pair.p().ln_density(u);
            match beta_value(self.pair, u, BetaMethod::Auto, spec_ref) {
                Ok(b) => (f(lp, &b) - peak).exp(),
                Err(_) => f64::NAN,
            }
        };
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (v, _) = integrate_with_error(g, w[0], w[1], &spec)?;
            total += v;
        }
        Ok(peak + total.ln() + INFLATE.ln_1p())
    }
}

fn ln_geometric_norm(s: f64, b: &BetaValue) -> f64 {
    // geometric moment bound: E[G^s] <= 2^{s-1} (Gamma(s+1) lambda^{-s} + 1), lambda = -ln(1 - beta)
    let lambda = -b.ln_complement;
    if lambda == f64::INFINITY {
        return 0.0;
    }
    let lg = log_gamma(s + 1.0).unwrap_or(f64::INFINITY);
    ((s - 1.0) * std::f64::consts::LN_2 + ln_add_exp(lg - s * lambda.ln(), 0.0)) / s
}

impl TailEnvelope {
    /// Computes knots from `n_max` upward until the Hölder remainder at
    /// `options.alpha_min` is below `options.target` or `k` exceeds `max_k`.
    ///
    /// Values are quadrature estimates inflated by a relative `1e-6`; mass of
    /// `P` beyond 40 standard deviations (700 scales for Laplace laws) is
    /// charged in full to every knot.
    pub fn build(pair: &DistributionPair, n_max: usize, options: &EnvelopeOptions) -> Result<Self> {
        if pair.is_finite() || pair.is_identical() {
            return Err(Error::UnsupportedKind("finite or identical"));
        }
        if !(options.ratio > 1.0) || !(options.alpha_min > 0.0 && options.alpha_min < 1.0) {
            return Err(Error::InvalidParameter(format!("{options:?}")));
        }
        let scan = Scan::new(pair)?;
        let ladder = ladder(n_max as f64, options);
        let mut knots: Vec<(f64, f64)> = Vec::new();
        let mut moments = Vec::new();
        let mut ln_tail_last = 0.0;
        for chunk in ladder.chunks(128) {
            let values: Vec<(f64, f64)> = chunk
                .par_iter()
                .map(|&k| {
                    let v = scan.ln_integral(|lp, b| lp + b.ln_beta() + times(k - 1.0, b.ln_complement))?;
                    Ok((k, ln_add_exp(v, scan.ln_outside)))
                })
                .collect::<Result<_>>()?;
            knots.extend(values);
            let m = knots.last().expect("nonempty chunk").0;
            ln_tail_last = ln_add_exp(scan.ln_integral(|lp, b| lp + m * b.ln_complement)?, scan.ln_outside);
            moments = MOMENT_ORDERS
                .par_iter()
                .map(|&s| {
                    let v = scan.ln_integral(|lp, b| {
                        lp + m * b.ln_complement + s * ln_add_exp(m.ln(), ln_geometric_norm(s, b))
                    })?;
                    Ok((s, v))
                })
                .collect::<Result<_>>()?;
            let env = TailEnvelope {
                knots: knots.clone(),
                moments: moments.clone(),
                ln_tail_last,
            };
            if env.ln_remainder(options.alpha_min) <= options.target.ln() {
                return Ok(env);
            }
        }
        Ok(TailEnvelope {
            knots,
            moments,
            ln_tail_last,
        })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Last knot `M`.
    pub fn last_knot(&self) -> f64 {
        self.knots.last().map_or(f64::NAN, |k| k.0)
    }

    /// Upper bound on `ln P(K > M)`.
    pub fn ln_tail_last(&self) -> f64 {
        self.ln_tail_last
    }

    /// Upper bound on `ln sum_{k > M} P(K = k)^alpha` from Hölder's inequality:
    /// `(E[K^s; K > M])^alpha (sum_{k > M} k^{-gamma})^{1 - alpha}` with
    /// `gamma = s alpha / (1 - alpha) > 1`, minimized over the moment table.
    pub fn ln_remainder(&self, alpha: f64) -> f64 {
        let m = self.last_knot();
        self.moments
            .iter()
            .filter_map(|&(s, ln_e)| {
                let gamma = s * alpha / (1.0 - alpha);
                (gamma > 1.0).then(|| alpha * ln_e + (1.0 - alpha) * ((1.0 - gamma) * m.ln() - (gamma - 1.0).ln()))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound on `ln sum_{k > N} P(K = k)^alpha`, `N` the first knot.
    pub fn ln_power_sum(&self, alpha: f64) -> f64 {
        let blocks = self.knots.windows(2).map(|w| {
            let count = w[1].0 - w[0].0;
            count.ln() + 1e-12 + alpha * w[0].1
        });
        ln_add_exp(log_sum_exp(blocks), self.ln_remainder(alpha))
    }
}

/// `n * ln_c`, with `0 * -inf = 0`.
fn times(n: f64, ln_c: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        n * ln_c
    }
}

fn ladder(start: f64, options: &EnvelopeOptions) -> Vec<f64> {
    let mut out = vec![start];
    let mut k = start;
    while k < options.max_k {
        let ratio = if k < 1e8 {
            options.ratio
        } else if k < 1e30 {
            options.ratio.max(1.05)
        } else {
            options.ratio.max(1.2)
        };
        let next = (k * ratio).ceil().max(k + 1.0);
        out.push(next);
        k = next;
    }
    out
}
