use std::f64::consts::LN_2;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{
    ln_one_minus_exp, log_sum_exp, std_normal_cdf, std_normal_ln_cdf, std_normal_ln_pdf, std_normal_ln_sf,
    std_normal_sf,
};

/// A point of the sample space: a real number, or a 0-based support index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Real(f64),
    Index(usize),
}

impl Point {
    /// The point as a real number (support indices map to themselves).
    pub fn value(self) -> f64 {
        match self {
            Point::Real(x) => x,
            Point::Index(i) => i as f64,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) => write!(f, "{x}"),
            Point::Index(i) => write!(f, "{i}"),
        }
    }
}

/// A univariate law: Gaussian, Laplacian or finite discrete.
///
/// `Laplace { theta, lambda }` has mean `theta` and variance `2 lambda^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarDistribution {
    Gaussian { mu: f64, sigma: f64 },
    Laplace { theta: f64, lambda: f64 },
    Finite { probs: Vec<f64> },
}

impl ScalarDistribution {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        let d = ScalarDistribution::Gaussian { mu, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn laplace(theta: f64, lambda: f64) -> Result<Self> {
        let d = ScalarDistribution::Laplace { theta, lambda };
        d.validate()?;
        Ok(d)
    }

    pub fn finite(probs: Vec<f64>) -> Result<Self> {
        let d = ScalarDistribution::Finite { probs };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => {
                if !mu.is_finite() || !(*sigma > 0.0) || !sigma.is_finite() {
                    return Err(Error::InvalidParameter(format!("normal({mu}, {sigma})")));
                }
            }
            ScalarDistribution::Laplace { theta, lambda } => {
                if !theta.is_finite() || !(*lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidParameter(format!("laplace({theta}, {lambda})")));
                }
            }
            ScalarDistribution::Finite { probs } => {
                if probs.is_empty() || probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
                    return Err(Error::InvalidParameter(format!("finite{probs:?}")));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!("finite probabilities sum to {total}")));
                }
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ScalarDistribution::Gaussian { .. } => "normal",
            ScalarDistribution::Laplace { .. } => "laplace",
            ScalarDistribution::Finite { .. } => "finite",
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, ScalarDistribution::Finite { .. })
    }

    /// Natural log of the density (or mass) at `x`.
    pub fn ln_density(&self, x: Point) -> f64 {
        match (self, x) {
            (ScalarDistribution::Gaussian { mu, sigma }, Point::Real(x)) => {
                std_normal_ln_pdf((x - mu) / sigma) - sigma.ln()
            }
            (ScalarDistribution::Laplace { theta, lambda }, Point::Real(x)) => {
                -(x - theta).abs() / lambda - (2.0 * lambda).ln()
            }
            (ScalarDistribution::Finite { probs }, Point::Index(i)) => {
                probs.get(i).map_or(f64::NEG_INFINITY, |p| p.ln())
            }
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn density(&self, x: Point) -> f64 {
        self.ln_density(x).exp()
    }

    pub fn cdf(&self, u: f64) -> Result<f64> {
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => Ok(std_normal_cdf((u - mu) / sigma)),
            ScalarDistribution::Laplace { theta, lambda } => {
                let z = (u - theta) / lambda;
                Ok(if z < 0.0 { 0.5 * z.exp() } else { 1.0 - 0.5 * (-z).exp() })
            }
            ScalarDistribution::Finite { .. } => Err(Error::UnsupportedKind("finite")),
        }
    }

    /// `1 - cdf(u)` computed without cancellation in the upper tail.
    pub fn sf(&self, u: f64) -> Result<f64> {
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => Ok(std_normal_sf((u - mu) / sigma)),
            ScalarDistribution::Laplace { theta, lambda } => {
                let z = (u - theta) / lambda;
                Ok(if z > 0.0 { 0.5 * (-z).exp() } else { 1.0 - 0.5 * z.exp() })
            }
            ScalarDistribution::Finite { .. } => Err(Error::UnsupportedKind("finite")),
        }
    }

    /// `ln cdf(u)`; `-inf` at `u = -inf`.
    pub(crate) fn ln_cdf(&self, u: f64) -> f64 {
        if u == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if u == f64::INFINITY {
            return 0.0;
        }
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => std_normal_ln_cdf((u - mu) / sigma),
            ScalarDistribution::Laplace { theta, lambda } => {
                let z = (u - theta) / lambda;
                if z < 0.0 {
                    z - LN_2
                } else {
                    (-0.5 * (-z).exp()).ln_1p()
                }
            }
            ScalarDistribution::Finite { .. } => f64::NAN,
        }
    }

    /// `ln sf(u)`; `-inf` at `u = +inf`.
    pub(crate) fn ln_sf(&self, u: f64) -> f64 {
        if u == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        if u == f64::NEG_INFINITY {
            return 0.0;
        }
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => std_normal_ln_sf((u - mu) / sigma),
            ScalarDistribution::Laplace { theta, lambda } => {
                let z = (u - theta) / lambda;
                if z > 0.0 {
                    -z - LN_2
                } else {
                    (-0.5 * z.exp()).ln_1p()
                }
            }
            ScalarDistribution::Finite { .. } => f64::NAN,
        }
    }

    /// Location of the median (continuous kinds).
    pub(crate) fn median(&self) -> f64 {
        match self {
            ScalarDistribution::Gaussian { mu, .. } => *mu,
            ScalarDistribution::Laplace { theta, .. } => *theta,
            ScalarDistribution::Finite { .. } => f64::NAN,
        }
    }

    /// `ln P((a, b))` for a continuous law, accurate when the interval lies in a tail.
    pub(crate) fn ln_interval_prob(&self, a: f64, b: f64) -> f64 {
        if !(a < b) {
            return f64::NEG_INFINITY;
        }
        let m = self.median();
        if b <= m {
            let (lb, la) = (self.ln_cdf(b), self.ln_cdf(a));
            lb + ln_one_minus_exp((la - lb).min(0.0))
        } else if a >= m {
            let (la, lb) = (self.ln_sf(a), self.ln_sf(b));
            la + ln_one_minus_exp((lb - la).min(0.0))
        } else {
            // Straddles the median: both tail masses are at most 1/2.
            let outside = self.ln_cdf(a).exp() + self.ln_sf(b).exp();
            (-outside).ln_1p()
        }
    }

    /// `ln P(set)` for a union of disjoint open intervals.
    pub(crate) fn ln_prob(&self, set: &[(f64, f64)]) -> f64 {
        log_sum_exp(set.iter().map(|&(a, b)| self.ln_interval_prob(a, b)))
    }

    /// Range `[lo, hi]` outside of which the law puts mass below roughly `1e-25`.
    pub(crate) fn effective_support(&self) -> (f64, f64) {
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => (mu - 10.5 * sigma, mu + 10.5 * sigma),
            ScalarDistribution::Laplace { theta, lambda } => (theta - 57.0 * lambda, theta + 57.0 * lambda),
            ScalarDistribution::Finite { probs } => (0.0, (probs.len() - 1) as f64),
        }
    }

    /// One draw from the law. Gaussian draws use the ziggurat method, Laplace and
    /// finite draws invert the CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                Point::Real(mu + sigma * z)
            }
            ScalarDistribution::Laplace { theta, lambda } => {
                // v uniform on (-1/2, 1/2]
                let v = 0.5 - rng.random::<f64>();
                let x = if v < 0.0 {
                    theta + lambda * (2.0 * (v + 0.5)).ln()
                } else {
                    theta - lambda * (2.0 * (0.5 - v)).max(f64::MIN_POSITIVE).ln()
                };
                Point::Real(x)
            }
            ScalarDistribution::Finite { probs } => {
                let v = rng.random::<f64>();
                let mut acc = 0.0;
                let mut last = 0;
                for (i, &p) in probs.iter().enumerate() {
                    if p <= 0.0 {
                        continue;
                    }
                    last = i;
                    acc += p;
                    if v < acc {
                        return Point::Index(i);
                    }
                }
                Point::Index(last)
            }
        }
    }
}

impl fmt::Display for ScalarDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarDistribution::Gaussian { mu, sigma } => write!(f, "normal:{mu},{sigma}"),
            ScalarDistribution::Laplace { theta, lambda } => write!(f, "laplace:{theta},{lambda}"),
            ScalarDistribution::Finite { probs } => {
                let parts: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
                write!(f, "finite:{}", parts.join(","))
            }
        }
    }
}
