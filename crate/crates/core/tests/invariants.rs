use approx::assert_relative_eq;
use proptest::prelude::*;

use wtp_core::group::{boundary, Dim, GroupPoint, Window};
use wtp_core::measures::{entropy_subadditivity_check, marginal, partition_entropy, MeasureSpec};
use wtp_core::oracle::walters_inequality;
use wtp_core::potential::Potential;
use wtp_core::pressure::{nested_partition_function, CylinderScheme, ExponentVector};
use wtp_core::symbolic::{enumerate_patterns, Subshift, SystemChain, DEFAULT_BUDGET};
use wtp_core::variational::{construct_nu_n, project_simplex, verify_logz_identity};

fn simplex(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|v| {
        let t: f64 = v.iter().sum();
        v.into_iter().map(|x| x / t).collect()
    })
}

fn subset(hi: i64) -> impl Strategy<Value = Window> {
    prop::collection::btree_set(0..hi, 1..=hi as usize)
        .prop_map(|s| Window::new(Dim::One, s.into_iter().map(GroupPoint::d1)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_form_a_distribution(a in prop::collection::vec(0.0f64..=1.0, 1..6)) {
        let w = ExponentVector::new(a).unwrap().weights();
        prop_assert!(w.as_slice().iter().all(|&x| x >= 0.0));
        prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn projection_lands_on_simplex(mut p in prop::collection::vec(-3.0f64..3.0, 1..8)) {
        project_simplex(&mut p);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Idempotent.
        let mut q = p.clone();
        project_simplex(&mut q);
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn walters_slack_nonnegative(p in simplex(5), a in prop::collection::vec(-5.0f64..5.0, 5)) {
        prop_assert!(walters_inequality(&p, &a).unwrap() >= -1e-12);
    }

    #[test]
    fn boundary_matches_definition(f in subset(10), k in subset(3)) {
        let b = boundary(&f, &k).unwrap();
        let expected: Vec<GroupPoint> = (-4..12)
            .map(GroupPoint::d1)
            .filter(|&g| {
                let kg = k.translate(g);
                kg.points().iter().any(|&p| f.contains(p)) && !kg.is_subset(&f)
            })
            .collect();
        prop_assert_eq!(b, expected);
    }

    #[test]
    fn marginals_restrict_consistently(p in simplex(3), n in 2i64..6) {
        let s = Subshift::full(3, Dim::One).unwrap();
        let m = MeasureSpec::bernoulli(p).unwrap();
        let big = marginal(&m, &s, &Window::interval(0, n).unwrap(), DEFAULT_BUDGET).unwrap();
        let small = marginal(&m, &s, &Window::interval(0, n - 1).unwrap(), DEFAULT_BUDGET).unwrap();
        prop_assert!(big.restrict(small.window()).unwrap().total_variation(&small).unwrap() < 1e-12);
        prop_assert!(partition_entropy(&big) >= partition_entropy(&small) - 1e-12);
    }

    #[test]
    fn subadditivity_slack(p in simplex(2), f in subset(7), a in subset(3)) {
        let s = Subshift::full(2, Dim::One).unwrap();
        let m = MeasureSpec::bernoulli(p).unwrap();
        prop_assert!(entropy_subadditivity_check(&m, &s, &f, &a, DEFAULT_BUDGET).unwrap() >= -1e-10);
    }

    #[test]
    fn logz_identity_on_collapse(
        a1 in 0.0f64..=1.0,
        vals in prop::collection::vec(-2.0f64..2.0, 4),
        n in 1i64..6,
    ) {
        let chain = SystemChain::full_collapse(&[0, 1, 1, 0], Dim::One).unwrap();
        let f = Potential::single_site("f", &vals, Dim::One).unwrap();
        let a = ExponentVector::new(vec![a1]).unwrap();
        let scheme = CylinderScheme::standard(&chain, 0).unwrap();
        let window = Window::interval(0, n).unwrap();
        let (nu, report) = construct_nu_n(&chain, &f, &a, &window, &scheme, DEFAULT_BUDGET).unwrap();
        assert_relative_eq!(nu.total(), 1.0, epsilon = 1e-12);
        let lz = nested_partition_function(&chain, &f, &a, &window, &scheme, DEFAULT_BUDGET).unwrap();
        assert_relative_eq!(report.log_z, lz, epsilon = 1e-12);
        let r = verify_logz_identity(&report, &a, a.weights().as_slice()).unwrap();
        prop_assert!(r <= 1e-9);
    }

    #[test]
    fn pattern_counts_are_submultiplicative(m in 1i64..6, n in 1i64..6) {
        let s = Subshift::golden_mean();
        let count = |k: i64| enumerate_patterns(&s, &Window::interval(0, k).unwrap(), DEFAULT_BUDGET).unwrap().len();
        prop_assert!(count(m + n) <= count(m) * count(n));
    }
}
