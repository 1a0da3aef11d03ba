use gwc::cli::config::{config_hash, parse_value, Format};
use gwc::concave::bound_form;
use gwc::conductance::{conductance_exact, series_resistance};
use gwc::montecarlo::{format_number, summarize, DepthSamples, Engine};
use gwc::rcm::{connection_prob_recursive, RCMParams};
use gwc::rng::Domain;
use gwc::tree::{evaluate_on_tree, evaluate_on_tree_with_boundary};
use gwc::{ExplicitTree, OffspringDistribution, RecursionFunction, Stream};
use proptest::prelude::*;

fn kernel() -> impl Strategy<Value = RecursionFunction> {
    prop_oneof![
        (0.1f64..5.0).prop_map(|s| RecursionFunction::conductance(s).unwrap()),
        (0.01f64..6.0, 0.1f64..2.0).prop_map(|(b, q)| RecursionFunction::rcm(b, q).unwrap()),
    ]
}

fn tree(seed: u64) -> ExplicitTree {
    let mut stream = Stream::new(seed, Domain::Corpus, 9, 0);
    let dist = OffspringDistribution::finite(vec![0.5, 0.3, 0.2]).unwrap();
    let depth = 1 + stream.index(6);
    ExplicitTree::sample_from(&dist, depth, &mut stream, 100_000).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn kernel_is_monotone(g in kernel(), x in 0.0f64..1e3, dx in 0.0f64..1e3) {
        prop_assert!(g.eval(x) <= g.eval(x + dx));
    }

    #[test]
    fn kernel_is_concave_and_below_identity(g in kernel(), x in 1e-6f64..50.0, y in 1e-6f64..50.0) {
        prop_assume!(g.is_concave());
        let mid = g.eval(0.5 * (x + y));
        prop_assert!(mid >= 0.5 * (g.eval(x) + g.eval(y)) - 1e-12 * mid);
        prop_assert!(g.eval(x) <= x * (1.0 + 1e-12));
    }

    #[test]
    fn sandwich_holds_off_grid(beta in 0.05f64..5.0, q in 0.2f64..2.0, x in 1e-5f64..1e5) {
        let g = RecursionFunction::rcm(beta, q).unwrap();
        let (k1, k2) = g.sandwich_constants().unwrap();
        let s = g.s_effective();
        let v = g.eval(x);
        prop_assert!(bound_form(x, k1, s) <= v * (1.0 + 1e-12));
        prop_assert!(v <= bound_form(x, k2, s) * (1.0 + 1e-12));
    }

    #[test]
    fn root_value_monotone_in_r(g in kernel(), seed in any::<u64>(), r in 0.1f64..2.0, dr in 0.0f64..1.0) {
        let t = tree(seed);
        prop_assert!(evaluate_on_tree(&t, &g, r)[0] <= evaluate_on_tree(&t, &g, r + dr)[0] * (1.0 + 1e-12));
    }

    #[test]
    fn finite_boundary_never_increases_root(g in kernel(), seed in any::<u64>(), r in 0.1f64..2.0, b in 0.0f64..100.0) {
        let t = tree(seed);
        let wired = evaluate_on_tree(&t, &g, r)[0];
        prop_assert!(evaluate_on_tree_with_boundary(&t, &g, r, b)[0] <= wired * (1.0 + 1e-12));
    }

    #[test]
    fn conductance_nondecreasing_in_s(seed in any::<u64>(), r in 0.2f64..2.0, s in 0.1f64..4.0, ds in 0.0f64..4.0) {
        let t = tree(seed);
        let a = conductance_exact(&t, s, r).unwrap();
        let b = conductance_exact(&t, s + ds, r).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12));
    }

    #[test]
    fn series_resistance_is_symmetric_and_dominates(a in 1e-3f64..1e3, b in 1e-3f64..1e3, s in 0.1f64..5.0) {
        let ab = series_resistance(a, b, s);
        prop_assert!((ab - series_resistance(b, a, s)).abs() <= 1e-12 * ab);
        prop_assert!(ab >= a.max(b));
    }

    #[test]
    fn connection_probability_in_unit_interval_and_monotone(
        seed in any::<u64>(), p in 0.01f64..0.98, dp in 0.0f64..0.01, q in 0.2f64..4.0,
    ) {
        let t = tree(seed);
        let lo = connection_prob_recursive(&t, &RCMParams::new(p, q).unwrap()).unwrap();
        let hi = connection_prob_recursive(&t, &RCMParams::new(p + dp, q).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(lo <= hi + 1e-12);
    }

    #[test]
    fn summary_quantiles_ordered(values in prop::collection::vec(0.0f64..1e6, 2..200)) {
        let w = vec![1.0; values.len()];
        let rec = summarize(&DepthSamples { n: 3, values, w, engine: Engine::Exact }, 1.0, 0);
        prop_assert!(rec.stderr >= 0.0);
        prop_assert!(rec.q05 <= rec.q25 && rec.q25 <= rec.q50 && rec.q50 <= rec.q75 && rec.q75 <= rec.q95);
        prop_assert!(rec.norm_ratio_q05 <= rec.norm_ratio_q50 && rec.norm_ratio_q50 <= rec.norm_ratio_q95);
    }

    #[test]
    fn csv_numbers_round_trip(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let back: f64 = format_number(x).parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn config_hash_ignores_key_order(perm in Just(()).prop_perturb(|_, mut rng| {
        let mut keys = vec!["schema", "name", "seed", "samples", "depths", "offspring", "kernel"];
        for i in (1..keys.len()).rev() {
            keys.swap(i, rng.random_range(0..=i));
        }
        keys
    })) {
        let field = |k: &str| match k {
            "schema" => r#""schema": "gwc.experiment.v1""#,
            "name" => r#""name": "x""#,
            "seed" => r#""seed": 4"#,
            "samples" => r#""samples": 500"#,
            "depths" => r#""depths": [3, 5, 8]"#,
            "offspring" => r#""offspring": {"p": 0.5, "kind": "geometric"}"#,
            _ => r#""kernel": {"s": 1.0, "kind": "conductance"}"#,
        };
        let canonical: Vec<&str> = ["depths", "kernel", "name", "offspring", "samples", "schema", "seed"].to_vec();
        let doc = |ks: &[&str]| format!("{{{}}}", ks.iter().map(|k| field(k)).collect::<Vec<_>>().join(", "));
        let a = config_hash(&parse_value(&doc(&perm), Format::Json).unwrap());
        let b = config_hash(&parse_value(&doc(&canonical), Format::Json).unwrap());
        prop_assert_eq!(a, b);
    }
}
