use std::f64::consts::LN_2;

use super::length::LengthFunction;
use crate::distributions::Order;
use crate::error::{Error, Result};
use crate::numerics::{ln_add_exp, LogSumExp};
use crate::pfr::IndexPmf;

/// Campbell cost of a truncated pmf: `value == lower`, and `upper` charges the
/// tail mass at the ceiling length (equal to `value` when the tail is empty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampbellCost {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Bracket `lower <= H_alpha(K) <= upper`, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBracket {
    pub lower: f64,
    pub upper: f64,
}

impl EntropyBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    Ok(())
}

/// `L(t) = (1/t) log sum_k p(k) 2^{t n_k}` over the truncated pmf, evaluated
/// with log-sum-exp so large `t n_k` cannot overflow.
pub fn campbell_cost(pmf: &IndexPmf, lf: &LengthFunction, t: f64, tail_ceiling: Option<f64>) -> Result<CampbellCost> {
    check_t(t)?;
    let mut acc = LogSumExp::default();
    for (i, &p) in pmf.probs().iter().enumerate() {
        if p > 0.0 {
            let n = lf.length(i as u64 + 1)? as f64;
            acc.push(p.ln() + t * n * LN_2);
        }
    }
    let ln_sum = acc.value();
    let value = ln_sum / (t * LN_2);
    let upper = if pmf.tail_mass() > 0.0 {
        let ceiling = tail_ceiling.ok_or(Error::UnboundedTail(pmf.tail_mass()))?;
        ln_add_exp(ln_sum, pmf.tail_mass().ln() + t * ceiling * LN_2) / (t * LN_2)
    } else {
        value
    };
    Ok(CampbellCost {
        value,
        lower: value,
        upper,
    })
}

/// `H_alpha(K) = (1/(1-alpha)) log sum_k p(k)^alpha` for `0 < alpha < 1`.
///
/// `lower` sums the truncated table. `upper` adds the tail bound of the pmf's
/// envelope; without an envelope a positive tail mass leaves the entropy
/// unbounded above (mass can spread over arbitrarily many indices), so `upper`
/// is `+inf`.
pub fn renyi_entropy(pmf: &IndexPmf, alpha: Order) -> Result<EntropyBracket> {
    let a = alpha.get();
    if a >= 1.0 {
        return Err(Error::OrderOutOfRange(a, "(0,1)"));
    }
    let mut acc = LogSumExp::default();
    for &p in pmf.probs() {
        if p > 0.0 {
            acc.push(a * p.ln());
        }
    }
    let ln_sum = acc.value();
    let scale = 1.0 / ((1.0 - a) * LN_2);
    let lower = ln_sum * scale;
    let upper = if pmf.tail_mass() == 0.0 {
        lower
    } else if let Some(env) = pmf.envelope() {
        ln_add_exp(ln_sum, env.ln_power_sum(a)) * scale
    } else {
        f64::INFINITY
    };
    Ok(EntropyBracket { lower, upper })
}

/// Plug-in estimate of `L(t)` from sampled indices.
pub fn empirical_campbell_cost(samples: &[u64], lf: &LengthFunction, t: f64) -> Result<f64> {
    check_t(t)?;
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut acc = LogSumExp::default();
    for &k in samples {
        acc.push(t * lf.length(k)? as f64 * LN_2);
    }
    Ok((acc.value() - (samples.len() as f64).ln()) / (t * LN_2))
}

/// Campbell's lengths for order `alpha`: `n_k = ceil(-log(p(k)^alpha / sum_j p(j)^alpha))`,
/// which satisfy Kraft and give `L(t) < H_alpha + 1` at `alpha = 1/(1+t)`.
/// Indices with zero probability get length 64.
pub fn campbell_optimal(pmf: &IndexPmf, alpha: Order) -> Result<LengthFunction> {
    let a = alpha.get();
    let mut acc = LogSumExp::default();
    for &p in pmf.probs() {
        if p > 0.0 {
            acc.push(a * p.ln());
        }
    }
    let ln_sum = acc.value();
    let lengths = pmf
        .probs()
        .iter()
        .map(|&p| {
            if p > 0.0 {
                ((ln_sum - a * p.ln()) / LN_2).ceil().max(1.0) as u32
            } else {
                64
            }
        })
        .collect();
    LengthFunction::custom(lengths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pmf(p: &[f64]) -> IndexPmf {
        IndexPmf::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn two_point_hand_value() {
        let c = campbell_cost(
            &pmf(&[0.5, 0.5]),
            &LengthFunction::custom(vec![1, 2]).unwrap(),
            1.0,
            None,
        )
        .unwrap();
        assert!((c.value - 3f64.log2()).abs() < 1e-14);
        assert_eq!(c.upper, c.value);
    }

    #[test]
    fn point_mass_costs_first_length() {
        let lf = LengthFunction::universal(0.5).unwrap();
        for t in [0.01, 1.0, 50.0] {
            let c = campbell_cost(&pmf(&[1.0]), &lf, t, None).unwrap();
            assert!((c.value - lf.length(1).unwrap() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_lengths_cost_that_length() {
        let lf = LengthFunction::custom(vec![3; 4]).unwrap();
        let c = campbell_cost(&pmf(&[0.1, 0.2, 0.3, 0.4]), &lf, 2.5, None).unwrap();
        assert!((c.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tail_requires_ceiling() {
        let p = IndexPmf::new(vec![0.5], 0.5).unwrap();
        let lf = LengthFunction::OneToOne;
        assert!(matches!(
            campbell_cost(&p, &lf, 1.0, None),
            Err(Error::UnboundedTail(_))
        ));
        let c = campbell_cost(&p, &lf, 1.0, Some(10.0)).unwrap();
        assert!(c.upper > c.lower);
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let lf = LengthFunction::custom(vec![2000, 3000]).unwrap();
        let c = campbell_cost(&pmf(&[0.5, 0.5]), &lf, 1.0, None).unwrap();
        assert!((c.value - 2999.0).abs() < 1e-9);
    }

    #[test]
    fn entropy_of_uniform_and_point_mass() {
        let a = Order::sub_unit(0.3).unwrap();
        let b = renyi_entropy(&pmf(&[0.25; 4]), a).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-12 && b.width() == 0.0);
        let b = renyi_entropy(&pmf(&[1.0]), a).unwrap();
        assert_eq!(b.lower, 0.0);
        let open = renyi_entropy(&IndexPmf::new(vec![0.5], 0.5).unwrap(), a).unwrap();
        assert_eq!(open.upper, f64::INFINITY);
    }

    #[test]
    fn empirical_matches_pmf_case() {
        let lf = LengthFunction::custom(vec![1, 2]).unwrap();
        assert!((empirical_campbell_cost(&[1, 2], &lf, 1.0).unwrap() - 3f64.log2()).abs() < 1e-14);
        let lf = LengthFunction::OneToOne;
        let v = empirical_campbell_cost(&[5; 10], &lf, 0.7).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn campbell_sandwich() {
        let p = pmf(&[0.5, 0.2, 0.15, 0.1, 0.05]);
        for alpha in [0.2, 0.5, 0.8] {
            let a = Order::sub_unit(alpha).unwrap();
            let t = (1.0 - alpha) / alpha;
            let lf = campbell_optimal(&p, a).unwrap();
            let (kraft, _) = lf.kraft_sum(5);
            assert!(kraft <= 1.0 + 1e-12);
            let l = campbell_cost(&p, &lf, t, None).unwrap().value;
            let h = renyi_entropy(&p, a).unwrap().lower;
            assert!(h <= l + 1e-12 && l < h + 1.0, "alpha {alpha}: H {h}, L {l}");
        }
    }
}
