use std::fmt::Write as _;

use super::beta::{beta_value, BetaMethod, BetaValue};
use super::envelope::TailEnvelope;
use crate::distributions::{DistributionPair, Point, ScalarDistribution};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, QuadratureSpec};

/// The law of the PFR index truncated at `N = probs.len()`, with the missing
/// mass `P(K > N)` kept explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPmf {
    probs: Vec<f64>,
    tail_mass: f64,
    envelope: Option<TailEnvelope>,
}

impl IndexPmf {
    /// `probs[k - 1] = P(K = k)`.
    pub fn new(probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter("negative or non-finite probability".into()));
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::NegativeTail(tail_mass));
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("pmf mass {total} != 1")));
        }
        Ok(Self {
            probs,
            tail_mass,
            envelope: None,
        })
    }

    /// A pmf whose tail mass is whatever `probs` leaves over; a leftover of
    /// rounding size (below 1e-12) counts as no tail.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        let tail = 1.0 - sum;
        if tail < -1e-9 {
            return Err(Error::NegativeTail(tail));
        }
        Self::new(probs, if tail < 1e-12 { 0.0 } else { tail })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(K = k)` for `1 <= k <= N`, zero beyond the table.
    pub fn prob(&self, k: u64) -> f64 {
        usize::try_from(k)
            .ok()
            .and_then(|k| k.checked_sub(1))
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn n_max(&self) -> usize {
        self.probs.len()
    }

    pub fn envelope(&self) -> Option<&TailEnvelope> {
        self.envelope.as_ref()
    }

    pub fn with_envelope(mut self, envelope: TailEnvelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    /// CSV with header `k,prob`, one row per `k` and a final `tail,<mass>` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,prob\n");
        for (i, p) in self.probs.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, p);
        }
        let _ = writeln!(out, "tail,{}", self.tail_mass);
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("k,prob") {
            return Err(Error::Parse("missing `k,prob` header".into()));
        }
        let mut probs = Vec::new();
        let mut tail = None;
        for line in lines {
            let (key, value) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad row {line:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value in {line:?}")))?;
            if key.trim() == "tail" {
                tail = Some(value);
            } else {
                let k: usize = key
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index in {line:?}")))?;
                if k != probs.len() + 1 {
                    return Err(Error::Parse(format!("rows out of order at k = {k}")));
                }
                probs.push(value);
            }
        }
        let tail = tail.ok_or_else(|| Error::Parse("missing tail row".into()))?;
        Self::new(probs, tail)
    }
}

/// `P(K = k) = E_P[beta(U) (1 - beta(U))^{k-1}]` for `k = 1..=n_max`.
///
/// Finite pairs are summed exactly. Continuous pairs use composite
/// Gauss-Legendre quadrature over the effective support of `P`, with `beta`
/// evaluated once per node; the panel count doubles until two successive
/// resolutions agree to `spec` on every `P(K = k)` and on the tail mass. The
/// tail `P(K > n_max)` is integrated directly rather than obtained by
/// subtraction.
pub fn index_pmf(pair: &DistributionPair, n_max: usize, spec: &QuadratureSpec) -> Result<IndexPmf> {
    spec.validate()?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be positive".into()));
    }
    if pair.is_identical() {
        let mut probs = vec![0.0; n_max];
        probs[0] = 1.0;
        return IndexPmf::new(probs, 0.0);
    }
    let (probs, tail) = if pair.is_finite() {
        let nodes: Vec<(f64, BetaValue)> = pair
            .finite_p()
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, &p)| Ok((p, beta_value(pair, Point::Index(i), BetaMethod::Auto, spec)?)))
            .collect::<Result<_>>()?;
        accumulate(&nodes, n_max, 0.0)
    } else {
        continuous_pmf(pair, n_max, spec)?
    };
    let residual = 1.0 - probs.iter().sum::<f64>();
    if residual < -1e-9 {
        return Err(Error::NegativeTail(residual));
    }
    IndexPmf::new(probs, tail)
}

/// Sums `w_j beta_j (1 - beta_j)^{k-1}` over nodes; returns probs and tail.
fn accumulate(nodes: &[(f64, BetaValue)], n_max: usize, extra_tail: f64) -> (Vec<f64>, f64) {
    let mut probs = vec![0.0; n_max];
    let mut tail = extra_tail;
    for (w, b) in nodes {
        if *w == 0.0 {
            continue;
        }
        let c = b.ln_complement.exp();
        let mut term = w * b.beta();
        for p in probs.iter_mut() {
            *p += term;
            term *= c;
            if term == 0.0 {
                break;
            }
        }
        tail += w * (n_max as f64 * b.ln_complement).exp();
    }
    (probs, tail)
}

pub(crate) fn ratio_breakpoints(pair: &DistributionPair) -> Vec<f64> {
    let mut breaks = vec![pair.p().median(), pair.q().median()];
    match (pair.p(), pair.q()) {
        (ScalarDistribution::Gaussian { mu: m1, sigma: s1 }, ScalarDistribution::Gaussian { mu: m2, sigma: s2 })
            if s1 != s2 =>
        {
            let (v1, v2) = (s1 * s1, s2 * s2);
            // vertex of the quadratic log ratio
            breaks.push((m1 / v1 - m2 / v2) / (1.0 / v1 - 1.0 / v2));
        }
        _ => {}
    }
    breaks
}

fn continuous_pmf(pair: &DistributionPair, n_max: usize, spec: &QuadratureSpec) -> Result<(Vec<f64>, f64)> {
    const ORDER: usize = 20;
    const MAX_PANELS: usize = 1 << 15;
    let (lo, hi) = pair.p().effective_support();
    let outside =
        pair.p().ln_interval_prob(f64::NEG_INFINITY, lo).exp() + pair.p().ln_interval_prob(hi, f64::INFINITY).exp();
    let mut edges: Vec<f64> = ratio_breakpoints(pair)
        .into_iter()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    edges.push(lo);
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let (gx, gw) = gauss_legendre(ORDER);

    let mut panels = 64usize;
    let mut previous: Option<(Vec<f64>, f64)> = None;
    loop {
        let width = (hi - lo) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * ORDER + edges.len() * ORDER);
        for seg in edges.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let m = ((b - a) / width).ceil().max(1.0) as usize;
            let h = (b - a) / m as f64;
            for j in 0..m {
                let (pa, pb) = (a + j as f64 * h, a + (j + 1) as f64 * h);
                let (mid, half) = (0.5 * (pa + pb), 0.5 * (pb - pa));
                for (x, w) in gx.iter().zip(&gw) {
                    let u = mid + half * x;
                    let weight = half * w * pair.p().density(Point::Real(u));
                    nodes.push((u, weight));
                }
            }
        }
        let evaluated: Vec<(f64, BetaValue)> = nodes
            .iter()
            .map(|&(u, w)| Ok((w, beta_value(pair, Point::Real(u), BetaMethod::Auto, spec)?)))
            .collect::<Result<_>>()?;
        let current = accumulate(&evaluated, n_max, outside);
        if let Some((prev_probs, prev_tail)) = &previous {
            let close = |a: f64, b: f64| (a - b).abs() <= spec.abs_tol.max(spec.rel_tol * a.abs());
            let ok = current.0.iter().zip(prev_probs).all(|(a, b)| close(*a, *b)) && close(current.1, *prev_tail);
            if ok {
                return Ok(current);
            }
        }
        if panels >= MAX_PANELS {
            let err = previous
                .map(|(p, t)| {
                    current
                        .0
                        .iter()
                        .zip(&p)
                        .map(|(a, b)| (a - b).abs())
                        .fold((current.1 - t).abs(), f64::max)
                })
                .unwrap_or(f64::INFINITY);
            return Err(Error::NonConvergence {
                subdivisions: panels,
                estimate: current.1,
                error: err,
            });
        }
        previous = Some(current);
        panels *= 2;
    }
}
