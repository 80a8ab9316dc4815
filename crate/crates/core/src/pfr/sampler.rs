use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::beta::{beta_value, ln_excess, BetaMethod};
use crate::distributions::{renyi_divergence, DistributionPair, Point};
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;

/// How a PFR run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    /// No later candidate could have won.
    Exact,
    /// The expected number of missed improvements is at most `delta`.
    Approximate { delta: f64 },
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Exact => write!(f, "exact"),
            Termination::Approximate { delta } => write!(f, "approx:{delta:e}"),
        }
    }
}

/// One draw of the PFR index `K` together with the selected sample `U_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfrOutcome {
    pub index: u64,
    pub accepted: Point,
    pub candidates_examined: u64,
    pub termination: Termination,
}

/// Stopping rule of [`run_pfr`] when the likelihood ratio is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoppingRule {
    /// Expected future improvements `S * E_Q[(r - T/S)^+]`, evaluated exactly
    /// from the superlevel sets of the ratio.
    #[default]
    ExactTail,
    /// Markov bound `2^{D_2} S^2 / T` on the same quantity.
    Markov,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PfrConfig {
    pub delta: f64,
    pub max_candidates: u64,
    pub stopping: StoppingRule,
}

impl Default for PfrConfig {
    fn default() -> Self {
        Self {
            delta: 1e-8,
            max_candidates: 100_000_000,
            stopping: StoppingRule::ExactTail,
        }
    }
}

impl PfrConfig {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }
}

/// Runs the Poisson functional representation: candidates `U_i ~ Q` arrive at
/// the points `T_i` of a unit-rate Poisson process and the selected index is
/// `argmin_i T_i / r(U_i)`.
///
/// Runs stop exactly once `T_i / sup r` exceeds the running minimum when the
/// ratio is bounded (always the case for finite pairs). Otherwise the run stops
/// once the expected number of later improvements drops to `config.delta`.
pub fn run_pfr<R: Rng + ?Sized>(pair: &DistributionPair, rng: &mut R, config: &PfrConfig) -> Result<PfrOutcome> {
    if !(config.delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {}", config.delta)));
    }
    let ln_sup = pair.ln_ratio_sup();
    let bounded = ln_sup.is_finite();
    let ln_second_moment = match (bounded, config.stopping) {
        (false, StoppingRule::Markov) => renyi_divergence(pair, 2.0)? * std::f64::consts::LN_2,
        _ => f64::NAN,
    };
    let ln_delta = config.delta.ln();

    let mut t = 0.0f64;
    let mut best_ln = f64::INFINITY; // ln S, S = min T_i / r(U_i)
    let mut best = (0u64, Point::Real(f64::NAN));
    let mut next_check = 0.0f64;
    let mut i = 0u64;
    loop {
        if i >= config.max_candidates {
            return Err(Error::IterationCap(config.max_candidates));
        }
        i += 1;
        let e: f64 = Exp1.sample(rng);
        t += e;
        let u = pair.q().sample(rng);
        let ln_r = pair.ln_ratio(u);
        let score = t.ln() - ln_r;
        if score < best_ln {
            best_ln = score;
            best = (i, u);
        }
        if !best_ln.is_finite() {
            continue;
        }
        let ln_t = t.ln();
        if bounded {
            if ln_t - ln_sup >= best_ln {
                return Ok(outcome(best, i, Termination::Exact));
            }
            continue;
        }
        if t < next_check {
            continue;
        }
        next_check = t * 1.05;
        // ln of the expected number of future improvements
        let ln_future = match config.stopping {
            StoppingRule::ExactTail => best_ln + ln_excess(pair, ln_t - best_ln),
            StoppingRule::Markov => ln_second_moment + 2.0 * best_ln - ln_t,
        };
        if ln_future <= ln_delta {
            return Ok(outcome(best, i, Termination::Approximate { delta: config.delta }));
        }
    }
}

fn outcome(best: (u64, Point), examined: u64, termination: Termination) -> PfrOutcome {
    PfrOutcome {
        index: best.0,
        accepted: best.1,
        candidates_examined: examined,
        termination,
    }
}

/// Draws `(K, U_K)` from the PFR's joint law without running the process:
/// `u ~ P`, then `K ~ Geo(beta(u))` by inversion.
pub fn sample_index_exact<R: Rng + ?Sized>(
    pair: &DistributionPair,
    rng: &mut R,
    spec: &QuadratureSpec,
) -> Result<PfrOutcome> {
    let u = pair.p().sample(rng);
    let b = beta_value(pair, u, BetaMethod::Auto, spec)?;
    let v = 1.0 - rng.random::<f64>(); // (0, 1]
    let index = geometric_from_uniform(v, b.ln_complement, b.beta())?;
    Ok(PfrOutcome {
        index,
        accepted: u,
        candidates_examined: index,
        termination: Termination::Exact,
    })
}

/// `ceil(ln v / ln(1 - beta))`, at least one.
pub(crate) fn geometric_from_uniform(v: f64, ln_complement: f64, beta: f64) -> Result<u64> {
    if ln_complement == f64::NEG_INFINITY || v >= 1.0 {
        return Ok(1);
    }
    let k = (v.ln() / ln_complement).ceil();
    if !(k < u64::MAX as f64) {
        return Err(Error::Overflow { beta });
    }
    Ok((k as u64).max(1))
}
