use crate::distributions::{DistributionPair, Monotonicity, Point};
use crate::error::{Error, Result};
use crate::numerics::{integrate_real_line, ln_add_exp, ln_sub_exp, log_sum_exp, QuadratureSpec};

/// How [`beta`] evaluates `E_Q[max{r(u), r(U)}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaMethod {
    /// Closed form: tail probabilities of the superlevel set `{r > r(u)}`.
    #[default]
    Auto,
    /// Adaptive quadrature of `max{r(u) q(x), p(x)}`.
    Quadrature,
}

/// `beta(u)` held in log form: `ln(1/beta)` and `ln(1 - beta)`.
///
/// Keeping `ln(1 - beta)` separately avoids the cancellation in `1 - beta`
/// when `beta` is close to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValue {
    pub ln_inv: f64,
    pub ln_complement: f64,
}

impl BetaValue {
    pub const ONE: BetaValue = BetaValue {
        ln_inv: 0.0,
        ln_complement: f64::NEG_INFINITY,
    };

    pub fn beta(&self) -> f64 {
        (-self.ln_inv).exp()
    }

    pub fn ln_beta(&self) -> f64 {
        -self.ln_inv
    }

    /// Builds the value from `ln(1/beta)` and `ln(1/beta - 1)`.
    ///
    /// For small `beta`, `ln(1 - beta)` comes from `ln_1p(-beta)`; the
    /// difference of logs would lose all precision once `beta` drops below
    /// about `1e-8`.
    pub(crate) fn from_logs(ln_inv: f64, ln_excess: f64) -> Self {
        let ln_inv = ln_inv.max(0.0);
        let beta = (-ln_inv).exp();
        let ln_complement = if beta < 0.5 {
            (-beta).ln_1p()
        } else {
            (ln_excess - ln_inv).min(0.0)
        };
        BetaValue { ln_inv, ln_complement }
    }
}

/// Log masses of a set `A` and its complement under `P` and `Q`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitMasses {
    pub ln_p_in: f64,
    pub ln_q_in: f64,
    pub ln_p_out: f64,
    pub ln_q_out: f64,
}

pub(crate) fn complement(set: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(set.len() + 1);
    let mut cursor = f64::NEG_INFINITY;
    for &(a, b) in set {
        if a > cursor {
            out.push((cursor, a));
        }
        cursor = b;
    }
    if cursor < f64::INFINITY {
        out.push((cursor, f64::INFINITY));
    }
    out
}

pub(crate) fn split_masses(pair: &DistributionPair, set: &[(f64, f64)]) -> SplitMasses {
    let out = complement(set);
    SplitMasses {
        ln_p_in: pair.p().ln_prob(set),
        ln_q_in: pair.q().ln_prob(set),
        ln_p_out: pair.p().ln_prob(&out),
        ln_q_out: pair.q().ln_prob(&out),
    }
}

/// `ln E_Q[(r - c)^+] = ln(P(r > c) - c Q(r > c))` for a continuous pair.
pub(crate) fn ln_excess(pair: &DistributionPair, ln_c: f64) -> f64 {
    if pair.is_finite() {
        let terms = pair
            .finite_p()
            .iter()
            .zip(pair.finite_q())
            .filter(|(p, q)| **q > 0.0 && **p > 0.0 && p.ln() - q.ln() > ln_c)
            .map(|(p, q)| ln_sub_exp(p.ln(), ln_c + q.ln()));
        return log_sum_exp(terms);
    }
    let set = pair.superlevel(ln_c);
    let m = split_masses(pair, &set);
    ln_sub_exp(m.ln_p_in, ln_c + m.ln_q_in)
}

/// `beta(u) = 1 / E_{U~Q}[max{r(u), r(U)}]`, the success probability of the
/// geometric law of the PFR index given the accepted sample `u`.
pub fn beta(pair: &DistributionPair, u: Point, spec: &QuadratureSpec) -> Result<f64> {
    beta_value(pair, u, BetaMethod::Auto, spec).map(|b| b.beta())
}

pub fn beta_value(pair: &DistributionPair, u: Point, method: BetaMethod, spec: &QuadratureSpec) -> Result<BetaValue> {
    let ln_r = pair.ln_ratio(u);
    if ln_r.is_nan() {
        return Err(Error::Domain(format!("{u} is outside the support of Q")));
    }
    if pair.is_identical() {
        return Ok(BetaValue::ONE);
    }
    if pair.is_finite() {
        return Ok(finite_beta(pair, ln_r));
    }
    match method {
        BetaMethod::Auto => Ok(closed_form_beta(pair, u.value(), ln_r)),
        BetaMethod::Quadrature => quadrature_beta(pair, ln_r, spec),
    }
}

fn finite_beta(pair: &DistributionPair, ln_r: f64) -> BetaValue {
    let (p, q) = (pair.finite_p(), pair.finite_q());
    // 1/beta - 1 = sum over {r_j < r} of (r q_j - p_j)
    let mut excess = Vec::new();
    for (&pj, &qj) in p.iter().zip(q) {
        if qj == 0.0 {
            continue;
        }
        let ln_rj = if pj == 0.0 {
            f64::NEG_INFINITY
        } else {
            pj.ln() - qj.ln()
        };
        if ln_rj < ln_r {
            excess.push(ln_sub_exp(
                ln_r + qj.ln(),
                if pj == 0.0 { f64::NEG_INFINITY } else { pj.ln() },
            ));
        }
    }
    let ln_excess = log_sum_exp(excess);
    BetaValue::from_logs(ln_add_exp(0.0, ln_excess), ln_excess)
}

fn closed_form_beta(pair: &DistributionPair, u: f64, ln_r: f64) -> BetaValue {
    let set = match pair.monotonicity() {
        Monotonicity::Constant => return BetaValue::ONE,
        // Phi_P(u) + r(u) (1 - Phi_Q(u))
        Monotonicity::Decreasing => vec![(f64::NEG_INFINITY, u)],
        // (1 - Phi_P(u)) + r(u) Phi_Q(u)
        Monotonicity::Increasing => vec![(u, f64::INFINITY)],
        Monotonicity::NonMonotone => pair.superlevel(ln_r),
    };
    let m = split_masses(pair, &set);
    // 1/beta = P(A) + r(u) Q(A^c);  1/beta - 1 = r(u) Q(A^c) - P(A^c)
    let ln_inv = ln_add_exp(m.ln_p_in, ln_r + m.ln_q_out);
    let ln_excess = ln_sub_exp(ln_r + m.ln_q_out, m.ln_p_out);
    BetaValue::from_logs(ln_inv, ln_excess)
}

fn quadrature_beta(pair: &DistributionPair, ln_r: f64, spec: &QuadratureSpec) -> Result<BetaValue> {
    let mut breaks: Vec<f64> = pair.superlevel(ln_r).iter().flat_map(|&(a, b)| [a, b]).collect();
    breaks.push(pair.p().median());
    breaks.push(pair.q().median());
    let inv = integrate_real_line(
        |x| {
            let x = Point::Real(x);
            let lp = pair.p().ln_density(x);
            let lq = pair.q().ln_density(x) + ln_r;
            lp.max(lq).exp()
        },
        &breaks,
        spec,
    )?;
    let inv = inv.max(1.0);
    Ok(BetaValue::from_logs(inv.ln(), (inv - 1.0).ln()))
}
