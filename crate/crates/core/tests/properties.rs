use exact_sampling::bounds::{csv_cell, lb1, lb2, optimize_ub, ub2_epsilon_max, UpperBound};
use exact_sampling::codes::{campbell_cost, campbell_optimal, renyi_entropy, LengthFunction};
use exact_sampling::distributions::{
    kl_divergence, renyi_divergence, DistributionPair, Order, Point, ScalarDistribution,
};
use exact_sampling::numerics::{integrate, log_gamma, minimize_scalar, MinimizeSpec, QuadratureSpec};
use exact_sampling::pfr::{beta, beta_value, index_pmf, sample_batch, BetaMethod, IndexPmf, PfrConfig, SamplerMethod};
use proptest::prelude::*;

fn gaussian_pair() -> impl Strategy<Value = DistributionPair> {
    (-3.0..3.0f64, 0.5..2.0f64, -3.0..3.0f64, 0.5..2.0f64).prop_map(|(m1, s1, m2, s2)| {
        DistributionPair::new(
            ScalarDistribution::gaussian(m1, s1).unwrap(),
            ScalarDistribution::gaussian(m2, s2).unwrap(),
        )
        .unwrap()
    })
}

fn laplace_pair() -> impl Strategy<Value = DistributionPair> {
    (-3.0..3.0f64, 0.5..2.0f64, -3.0..3.0f64, 0.5..2.0f64).prop_map(|(t1, l1, t2, l2)| {
        DistributionPair::new(
            ScalarDistribution::laplace(t1, l1).unwrap(),
            ScalarDistribution::laplace(t2, l2).unwrap(),
        )
        .unwrap()
    })
}

fn shifted_gaussian_pair() -> impl Strategy<Value = DistributionPair> {
    (-2.0..2.0f64).prop_map(|mu| {
        DistributionPair::new(
            ScalarDistribution::gaussian(0.0, 1.0).unwrap(),
            ScalarDistribution::gaussian(mu, 1.0).unwrap(),
        )
        .unwrap()
    })
}

fn continuous_pair() -> impl Strategy<Value = DistributionPair> {
    prop_oneof![gaussian_pair(), laplace_pair()]
}

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, n).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

fn finite_pair() -> impl Strategy<Value = DistributionPair> {
    (2usize..6)
        .prop_flat_map(|n| (simplex(n), simplex(n)))
        .prop_map(|(p, q)| {
            DistributionPair::new(
                ScalarDistribution::finite(p).unwrap(),
                ScalarDistribution::finite(q).unwrap(),
            )
            .unwrap()
        })
}

fn random_pmf() -> impl Strategy<Value = IndexPmf> {
    (2usize..40)
        .prop_flat_map(simplex)
        .prop_map(|p| IndexPmf::from_probs(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integrate_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, w in 0.5..6.0f64, lo in -2.0..0.0f64, hi in 0.1..3.0f64) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (w * x).sin() + x * x;
        let g = |x: f64| (-x * x).exp();
        let combined = integrate(|x| a * f(x) + b * g(x), lo, hi, &spec).unwrap();
        let separate = a * integrate(f, lo, hi, &spec).unwrap() + b * integrate(g, lo, hi, &spec).unwrap();
        let tol = (a.abs() + b.abs() + 1.0) * (spec.abs_tol + spec.rel_tol * separate.abs().max(1.0));
        prop_assert!((combined - separate).abs() <= tol, "{combined} vs {separate}");
    }

    #[test]
    fn minimizer_beats_dense_grid(c in -5.0..3.0f64, s in 0.2..3.0f64, h in 0.0..2.0f64) {
        let f = |x: f64| ((x.ln() - c) / s).powi(2) + h * (3.0 * x.ln()).cos();
        let spec = MinimizeSpec::new(1e-3, 20.0);
        let (_, best) = minimize_scalar(f, &spec).unwrap();
        for i in 0..=2000 {
            let x = (1e-3f64.ln() + (20f64.ln() - 1e-3f64.ln()) * i as f64 / 2000.0).exp();
            prop_assert!(best <= f(x) + 1e-6, "min {best} > f({x}) = {}", f(x));
        }
    }

    #[test]
    fn divergence_nondecreasing_and_nonnegative(pair in continuous_pair(), a1 in 0.05..4.0f64, a2 in 0.05..4.0f64) {
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        prop_assume!(lo != 1.0 && hi != 1.0);
        let d_lo = renyi_divergence(&pair, lo).unwrap();
        let d_hi = renyi_divergence(&pair, hi).unwrap();
        prop_assert!(d_lo >= -1e-9);
        prop_assert!(d_lo <= d_hi + 1e-9, "D_{lo} = {d_lo} > D_{hi} = {d_hi}");
    }

    #[test]
    fn beta_is_a_probability(pair in prop_oneof![continuous_pair(), finite_pair()], x in -6.0..6.0f64, i in 0usize..2) {
        let u = if pair.is_finite() { Point::Index(i % 2) } else { Point::Real(x) };
        let b = beta(&pair, u, &QuadratureSpec::default()).unwrap();
        prop_assert!(b > 0.0 && b <= 1.0, "beta = {b}");
    }

    #[test]
    fn beta_closed_form_matches_quadrature(m1 in -2.0..2.0f64, m2 in -2.0..2.0f64, s in 0.6..2.0f64, x in -4.0..4.0f64) {
        prop_assume!((m1 - m2).abs() > 1e-3);
        let pair = DistributionPair::new(
            ScalarDistribution::gaussian(m1, s).unwrap(),
            ScalarDistribution::gaussian(m2, s).unwrap(),
        ).unwrap();
        let spec = QuadratureSpec::with_tolerances(1e-13, 1e-11);
        let closed = beta_value(&pair, Point::Real(x), BetaMethod::Auto, &spec).unwrap().beta();
        let quad = beta_value(&pair, Point::Real(x), BetaMethod::Quadrature, &spec).unwrap().beta();
        prop_assert!((closed - quad).abs() <= 1e-8, "{closed} vs {quad}");
    }

    #[test]
    fn entropy_nonincreasing_in_order(pmf in random_pmf(), a1 in 0.02..0.98f64, a2 in 0.02..0.98f64) {
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        let h_lo = renyi_entropy(&pmf, Order::sub_unit(lo).unwrap()).unwrap().lower;
        let h_hi = renyi_entropy(&pmf, Order::sub_unit(hi).unwrap()).unwrap().lower;
        prop_assert!(h_hi <= h_lo + 1e-9);
    }

    #[test]
    fn cost_nondecreasing_in_t(pmf in random_pmf(), t1 in 0.01..10.0f64, t2 in 0.01..10.0f64, eps in 0.1..2.0f64) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        for lf in [LengthFunction::power_law(eps).unwrap(), LengthFunction::universal(eps).unwrap(), LengthFunction::OneToOne] {
            let c_lo = campbell_cost(&pmf, &lf, lo, None).unwrap().value;
            let c_hi = campbell_cost(&pmf, &lf, hi, None).unwrap().value;
            prop_assert!(c_lo <= c_hi + 1e-9, "{lf}: L({lo}) = {c_lo} > L({hi}) = {c_hi}");
        }
    }

    #[test]
    fn cost_tends_to_mean_length(pmf in random_pmf(), eps in 0.1..2.0f64) {
        let lf = LengthFunction::universal(eps).unwrap();
        let mean: f64 = pmf.probs().iter().enumerate().map(|(i, p)| p * lf.length(i as u64 + 1).unwrap() as f64).sum();
        let l = campbell_cost(&pmf, &lf, 1e-4, None).unwrap().value;
        prop_assert!((l - mean).abs() <= 1e-3, "{l} vs {mean}");
    }

    #[test]
    fn campbell_lengths_sandwich(pmf in random_pmf(), alpha in 0.05..0.95f64) {
        let order = Order::sub_unit(alpha).unwrap();
        let h = renyi_entropy(&pmf, order).unwrap().lower;
        let lf = campbell_optimal(&pmf, order).unwrap();
        let (kraft, _) = lf.kraft_sum(pmf.probs().len() as u64);
        prop_assert!(kraft <= 1.0 + 1e-12);
        let l = campbell_cost(&pmf, &lf, order.campbell_t(), None).unwrap().value;
        prop_assert!(h - 1e-9 <= l && l < h + 1.0, "H = {h}, L = {l}");
    }

    #[test]
    fn csv_cells_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let back: f64 = csv_cell(Some(x)).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn index_pmf_round_trips_through_csv(pmf in random_pmf()) {
        let back = IndexPmf::from_csv(&pmf.to_csv()).unwrap();
        prop_assert_eq!(back.probs(), pmf.probs());
        prop_assert_eq!(back.tail_mass(), pmf.tail_mass());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn index_pmf_is_nonincreasing_and_normalized(pair in prop_oneof![finite_pair(), gaussian_pair(), laplace_pair()]) {
        let pmf = index_pmf(&pair, 200, &QuadratureSpec::default()).unwrap();
        let probs = pmf.probs();
        for w in probs.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-15, "{} then {}", w[0], w[1]);
        }
        let total: f64 = probs.iter().sum::<f64>() + pmf.tail_mass();
        prop_assert!((total - 1.0).abs() < 1e-8);
        prop_assert!(pmf.tail_mass() >= 0.0);
    }

    #[test]
    fn lower_bounds_stay_below_upper_bounds(pair in continuous_pair(), alpha in 0.2..0.99f64) {
        let spec = MinimizeSpec::default();
        let lb = lb1(&pair, alpha).unwrap().max(lb2(&pair, alpha).unwrap());
        let (_, u1) = optimize_ub(&pair, alpha, UpperBound::Ub1, &spec).unwrap();
        prop_assert!(lb <= u1, "lb {lb} > ub1 {u1}");
        if alpha > 2.0 / 3.0 + 1e-9 && ub2_epsilon_max(alpha) > spec.lo {
            let (_, u2) = optimize_ub(&pair, alpha, UpperBound::Ub2, &spec).unwrap();
            prop_assert!(u1 < u2 || u2 == f64::INFINITY, "ub1 {u1} >= ub2 {u2}");
        }
    }

    #[test]
    fn batches_are_reproducible(pair in prop_oneof![finite_pair(), shifted_gaussian_pair()], seed in any::<u64>()) {
        let spec = QuadratureSpec::default();
        for method in [SamplerMethod::Exact, SamplerMethod::Pfr] {
            let a = sample_batch(&pair, 32, seed, method, &PfrConfig::default(), &spec);
            let b = sample_batch(&pair, 32, seed, method, &PfrConfig::default(), &spec);
            let a: Vec<_> = a.into_iter().map(|r| r.map(|o| (o.index, o.accepted)).ok()).collect();
            let b: Vec<_> = b.into_iter().map(|r| r.map(|o| (o.index, o.accepted)).ok()).collect();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn gamma_recurrence() {
    for i in 0..=20 {
        let x = 0.5 + i as f64;
        let lhs = log_gamma(x + 1.0).unwrap().exp();
        let rhs = x * log_gamma(x).unwrap().exp();
        assert!((lhs / rhs - 1.0).abs() <= 1e-10, "x = {x}");
    }
}

#[test]
fn divergence_continuous_at_one() {
    let pairs = [
        ("normal:0,1", "normal:1,1"),
        ("normal:0,1", "normal:5,1"),
        ("normal:0,1", "normal:10,1"),
        ("normal:0,1", "normal:0,2"),
        ("laplace:0,1", "laplace:1,1"),
        ("laplace:0,1", "laplace:5,1"),
        ("laplace:0,1", "laplace:1,2"),
        ("laplace:0,1", "laplace:0,2"),
        ("finite:0.9,0.1", "finite:0.5,0.5"),
        ("finite:0.99,0.01", "finite:0.01,0.99"),
        ("finite:0.5,0.3,0.15,0.05", "finite:0.05,0.15,0.3,0.5"),
    ];
    for (p, q) in pairs {
        let pair = DistributionPair::new(p.parse().unwrap(), q.parse().unwrap()).unwrap();
        let d = renyi_divergence(&pair, 0.9999).unwrap();
        let kl = kl_divergence(&pair).unwrap();
        assert!((d - kl).abs() <= 1e-2, "{p} || {q}: {d} vs {kl}");
    }
}
