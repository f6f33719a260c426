use proptest::prelude::*;

use pmean::are::orlicz_norm;
use pmean::cli::fmt_num;
use pmean::ptest::{critical_value, pmean, sample_size, CritMethod, TestPlan};
use pmean::ExtendedP;

fn finite_p() -> impl Strategy<Value = f64> {
    prop_oneof![-4.0..-0.01f64, 0.01..6.0f64, Just(0.0), Just(-1.0), Just(2.0)]
}

fn any_p() -> impl Strategy<Value = ExtendedP> {
    prop_oneof![
        finite_p().prop_map(ExtendedP::Finite),
        Just(ExtendedP::NegInf),
        Just(ExtendedP::PosInf)
    ]
}

fn entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.01..10.0f64, -10.0..-0.01f64], 1..len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pmean_is_absolutely_homogeneous(p in any_p(), s in entries(20), lam in -5.0..5.0f64) {
        let a = pmean(p, &s);
        let scaled: Vec<f64> = s.iter().map(|x| lam * x).collect();
        let b = pmean(p, &scaled);
        prop_assert!((b - lam.abs() * a).abs() <= 1e-12 * (1.0 + b.abs()), "{a} {b}");
    }

    #[test]
    fn pmean_increases_with_p(s in entries(20), p in finite_p(), dq in 0.01..3.0f64) {
        let lo = pmean(ExtendedP::Finite(p), &s);
        let hi = pmean(ExtendedP::Finite(p + dq), &s);
        prop_assert!(lo <= hi * (1.0 + 1e-12));
        prop_assert!(pmean(ExtendedP::NegInf, &s) <= lo * (1.0 + 1e-12));
        prop_assert!(hi <= pmean(ExtendedP::PosInf, &s) * (1.0 + 1e-12));
    }

    #[test]
    fn pmean_ignores_order(p in any_p(), mut s in entries(20)) {
        let a = pmean(p, &s);
        s.reverse();
        s.rotate_left(1);
        prop_assert!((pmean(p, &s) - a).abs() <= 1e-13 * a.max(1.0));
    }

    #[test]
    fn orlicz_norm_is_homogeneous(p in -0.45..1.95f64, v in entries(40), lam in 0.05..20.0f64) {
        let a = orlicz_norm(p, 0.05, 0.95, &v).unwrap();
        let w: Vec<f64> = v.iter().map(|x| lam * x).collect();
        let b = orlicz_norm(p, 0.05, 0.95, &w).unwrap();
        prop_assert!((b - lam * a).abs() <= 1e-9 * b.max(1e-300), "{a} {b}");
    }

    #[test]
    fn printed_numbers_keep_twelve_digits(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs());
    }

    #[test]
    fn p_round_trips_through_text(p in any_p()) {
        let back: ExtendedP = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn critical_value_falls_with_alpha(p in any_p(), d in 20usize..5000, a in 0.01..0.2f64) {
        let c1 = critical_value(p, d, a, CritMethod::Asymptotic).unwrap().value;
        let c2 = critical_value(p, d, a * 1.5, CritMethod::Asymptotic).unwrap().value;
        prop_assert!(c2 <= c1, "{c1} {c2}");
    }

    #[test]
    fn sample_size_grows_with_beta(p in prop_oneof![Just(-0.25), Just(0.0), Just(1.0), Just(3.0)], d in 20usize..2000, b in 0.6..0.9f64) {
        let plan = |beta| TestPlan::with_direction(ExtendedP::Finite(p), 0.05, beta, vec![1.0; d]).unwrap();
        let n1 = sample_size(&plan(b)).unwrap();
        let n2 = sample_size(&plan(b + 0.05)).unwrap();
        prop_assert!(n1.n <= n2.n);
        prop_assert!(n1.power >= b - 1e-9);
    }
}
