use std::f64::consts::LN_2;

use super::scalar::{Point, ScalarDistribution};
use crate::error::{Error, Result};

/// Shape of the likelihood ratio `dP/dQ` on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    /// Nonincreasing in `u`.
    Decreasing,
    /// Nondecreasing in `u`.
    Increasing,
    NonMonotone,
}

/// `ln dP/dQ` for two laws of the same continuous family, kept in a form whose
/// superlevel sets can be solved exactly.
#[derive(Debug, Clone, PartialEq)]
enum LogRatio {
    /// `slope * x + intercept` (equal-variance Gaussians).
    Linear { slope: f64, intercept: f64 },
    /// `a x^2 + b x + c` (Gaussians with different variances).
    Quadratic {
        a: f64,
        b: f64,
        c: f64,
        mu1: f64,
        s1: f64,
        mu2: f64,
        s2: f64,
    },
    /// Piecewise linear on `(-inf, knots[0]), (knots[0], knots[1]), ...` (Laplace).
    Piecewise {
        knots: Vec<f64>,
        slopes: Vec<f64>,
        intercepts: Vec<f64>,
    },
    /// Finite alphabet: per-index log ratios (`-inf` where `p = 0`, `NaN` where `q = 0`).
    Table(Vec<f64>),
}

/// A pair `(P, Q)` of laws on the same space with `P << Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionPair {
    p: ScalarDistribution,
    q: ScalarDistribution,
    log_ratio: LogRatio,
}

impl DistributionPair {
    pub fn new(p: ScalarDistribution, q: ScalarDistribution) -> Result<Self> {
        p.validate()?;
        q.validate()?;
        let log_ratio = match (&p, &q) {
            (
                ScalarDistribution::Gaussian { mu: mu1, sigma: s1 },
                ScalarDistribution::Gaussian { mu: mu2, sigma: s2 },
            ) => {
                if s1 == s2 {
                    let v = s1 * s1;
                    LogRatio::Linear {
                        slope: (mu1 - mu2) / v,
                        intercept: (mu2 * mu2 - mu1 * mu1) / (2.0 * v),
                    }
                } else {
                    let (v1, v2) = (s1 * s1, s2 * s2);
                    LogRatio::Quadratic {
                        a: 0.5 / v2 - 0.5 / v1,
                        b: mu1 / v1 - mu2 / v2,
                        c: (s2 / s1).ln() - mu1 * mu1 / (2.0 * v1) + mu2 * mu2 / (2.0 * v2),
                        mu1: *mu1,
                        s1: *s1,
                        mu2: *mu2,
                        s2: *s2,
                    }
                }
            }
            (
                ScalarDistribution::Laplace { theta: t1, lambda: l1 },
                ScalarDistribution::Laplace { theta: t2, lambda: l2 },
            ) => laplace_log_ratio(*t1, *l1, *t2, *l2),
            (ScalarDistribution::Finite { probs: pp }, ScalarDistribution::Finite { probs: qq }) => {
                if pp.len() != qq.len() {
                    return Err(Error::InvalidParameter(format!(
                        "finite supports differ in size ({} vs {})",
                        pp.len(),
                        qq.len()
                    )));
                }
                let mut table = Vec::with_capacity(pp.len());
                for (i, (&pi, &qi)) in pp.iter().zip(qq).enumerate() {
                    if qi == 0.0 && pi > 0.0 {
                        return Err(Error::AbsoluteContinuity(format!("index {i}")));
                    }
                    table.push(if qi == 0.0 {
                        f64::NAN
                    } else if pi == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        pi.ln() - qi.ln()
                    });
                }
                LogRatio::Table(table)
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "P ({}) and Q ({}) must belong to the same family",
                    p.kind_name(),
                    q.kind_name()
                )))
            }
        };
        Ok(Self { p, q, log_ratio })
    }

    pub fn p(&self) -> &ScalarDistribution {
        &self.p
    }

    pub fn q(&self) -> &ScalarDistribution {
        &self.q
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.log_ratio, LogRatio::Table(_))
    }

    /// True when `P == Q`, i.e. the ratio is identically one.
    pub fn is_identical(&self) -> bool {
        self.p == self.q
    }

    /// Mutual absolute continuity (`P ~ Q`).
    pub fn mutually_continuous(&self) -> bool {
        match &self.log_ratio {
            LogRatio::Table(t) => {
                t.iter().all(|v| v.is_finite() || v.is_nan())
                    && t.iter().zip(self.finite_q()).all(|(v, &q)| !(v.is_nan() && q > 0.0))
            }
            _ => true,
        }
    }

    pub(crate) fn finite_p(&self) -> &[f64] {
        match &self.p {
            ScalarDistribution::Finite { probs } => probs,
            _ => &[],
        }
    }

    pub(crate) fn finite_q(&self) -> &[f64] {
        match &self.q {
            ScalarDistribution::Finite { probs } => probs,
            _ => &[],
        }
    }

    /// Natural log of `dP/dQ` at `x`. Points outside the support of `Q` give `NaN`.
    pub fn ln_ratio(&self, x: Point) -> f64 {
        match (&self.log_ratio, x) {
            (LogRatio::Linear { slope, intercept }, Point::Real(x)) => slope * x + intercept,
            (LogRatio::Quadratic { mu1, s1, mu2, s2, .. }, Point::Real(x)) => {
                let z1 = (x - mu1) / s1;
                let z2 = (x - mu2) / s2;
                (s2 / s1).ln() - 0.5 * z1 * z1 + 0.5 * z2 * z2
            }
            (
                LogRatio::Piecewise {
                    knots,
                    slopes,
                    intercepts,
                },
                Point::Real(x),
            ) => {
                let j = knots.partition_point(|k| *k <= x);
                // Flat pieces must evaluate to a value independent of x.
                if slopes[j] == 0.0 {
                    intercepts[j]
                } else {
                    slopes[j] * x + intercepts[j]
                }
            }
            (LogRatio::Table(t), Point::Index(i)) => t.get(i).copied().unwrap_or(f64::NAN),
            _ => f64::NAN,
        }
    }

    /// `log2 (dP/dQ)(u)`.
    pub fn log2_density_ratio(&self, u: Point) -> Result<f64> {
        let v = self.ln_ratio(u);
        if v.is_nan() {
            return Err(Error::Domain(format!("{u} is outside the support of Q")));
        }
        Ok(v / LN_2)
    }

    /// `ln sup_u dP/dQ(u)`, `+inf` when the ratio is unbounded.
    pub fn ln_ratio_sup(&self) -> f64 {
        match &self.log_ratio {
            LogRatio::Linear { slope, intercept } => {
                if *slope == 0.0 {
                    *intercept
                } else {
                    f64::INFINITY
                }
            }
            LogRatio::Quadratic { a, b, c, .. } => {
                if *a < 0.0 {
                    c - b * b / (4.0 * a)
                } else {
                    f64::INFINITY
                }
            }
            LogRatio::Piecewise {
                knots,
                slopes,
                intercepts,
            } => {
                let last = slopes.len() - 1;
                if slopes[0] < 0.0 || slopes[last] > 0.0 {
                    return f64::INFINITY;
                }
                let mut best = f64::NEG_INFINITY;
                for (j, k) in knots.iter().enumerate() {
                    best = best.max(slopes[j] * k + intercepts[j]);
                }
                best.max(intercepts[0].min(if slopes[0] == 0.0 {
                    intercepts[0]
                } else {
                    f64::NEG_INFINITY
                }))
                .max(if slopes[last] == 0.0 {
                    intercepts[last]
                } else {
                    f64::NEG_INFINITY
                })
            }
            LogRatio::Table(t) => t
                .iter()
                .copied()
                .filter(|v| !v.is_nan())
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match &self.log_ratio {
            LogRatio::Linear { slope, .. } => {
                if *slope < 0.0 {
                    Monotonicity::Decreasing
                } else if *slope > 0.0 {
                    Monotonicity::Increasing
                } else {
                    Monotonicity::Constant
                }
            }
            LogRatio::Quadratic { .. } => Monotonicity::NonMonotone,
            LogRatio::Piecewise { slopes, .. } => {
                if slopes.iter().all(|s| *s == 0.0) {
                    Monotonicity::Constant
                } else if slopes.iter().all(|s| *s <= 0.0) {
                    Monotonicity::Decreasing
                } else if slopes.iter().all(|s| *s >= 0.0) {
                    Monotonicity::Increasing
                } else {
                    Monotonicity::NonMonotone
                }
            }
            LogRatio::Table(_) => Monotonicity::NonMonotone,
        }
    }

    /// `{x : ln dP/dQ(x) > level}` as sorted disjoint open intervals (continuous pairs).
    pub(crate) fn superlevel(&self, level: f64) -> Vec<(f64, f64)> {
        const NEG: f64 = f64::NEG_INFINITY;
        const POS: f64 = f64::INFINITY;
        match &self.log_ratio {
            LogRatio::Linear { slope, intercept } => {
                if *slope == 0.0 {
                    if *intercept > level {
                        vec![(NEG, POS)]
                    } else {
                        vec![]
                    }
                } else {
                    let x0 = (level - intercept) / slope;
                    if *slope > 0.0 {
                        vec![(x0, POS)]
                    } else {
                        vec![(NEG, x0)]
                    }
                }
            }
            LogRatio::Quadratic { a, b, c, .. } => {
                let c0 = c - level;
                let disc = b * b - 4.0 * a * c0;
                if disc <= 0.0 {
                    return if *a > 0.0 { vec![(NEG, POS)] } else { vec![] };
                }
                let sq = disc.sqrt();
                let qq = -0.5 * (b + b.signum().max(0.0).mul_add(2.0, -1.0) * sq);
                let (mut r1, mut r2) = (qq / a, c0 / qq);
                if r1 > r2 {
                    std::mem::swap(&mut r1, &mut r2);
                }
                if *a > 0.0 {
                    vec![(NEG, r1), (r2, POS)]
                } else {
                    vec![(r1, r2)]
                }
            }
            LogRatio::Piecewise {
                knots,
                slopes,
                intercepts,
            } => {
                let mut out: Vec<(f64, f64)> = Vec::new();
                for j in 0..slopes.len() {
                    let lo = if j == 0 { NEG } else { knots[j - 1] };
                    let hi = if j == knots.len() { POS } else { knots[j] };
                    let (s, k) = (slopes[j], intercepts[j]);
                    let piece = if s == 0.0 {
                        (k > level).then_some((lo, hi))
                    } else {
                        let x0 = (level - k) / s;
                        let (a, b) = if s > 0.0 { (x0.max(lo), hi) } else { (lo, x0.min(hi)) };
                        (a < b).then_some((a, b))
                    };
                    if let Some((a, b)) = piece {
                        match out.last_mut() {
                            Some(last) if last.1 >= a => last.1 = b,
                            _ => out.push((a, b)),
                        }
                    }
                }
                out
            }
            LogRatio::Table(_) => vec![],
        }
    }
}

fn laplace_log_ratio(t1: f64, l1: f64, t2: f64, l2: f64) -> LogRatio {
    // ln r(x) = ln(l2/l1) - |x - t1|/l1 + |x - t2|/l2
    let base = (l2 / l1).ln();
    let mut knots = vec![t1, t2];
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut slopes = Vec::new();
    let mut intercepts = Vec::new();
    for j in 0..=knots.len() {
        // sign of (x - t) on piece j
        let probe_side = |t: f64| -> f64 {
            // number of knots <= t decides which side of t piece j lies on
            let idx = knots.partition_point(|k| *k <= t);
            if j >= idx {
                1.0
            } else {
                -1.0
            }
        };
        let s1 = probe_side(t1);
        let s2 = probe_side(t2);
        // -s1 (x - t1)/l1 + s2 (x - t2)/l2
        let slope = -s1 / l1 + s2 / l2;
        let intercept = base + s1 * t1 / l1 - s2 * t2 / l2;
        slopes.push(if slope.abs() < 1e-15 * (1.0 / l1 + 1.0 / l2) {
            0.0
        } else {
            slope
        });
        intercepts.push(intercept);
    }
    LogRatio::Piecewise {
        knots,
        slopes,
        intercepts,
    }
}
