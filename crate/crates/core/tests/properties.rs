use golden_core::catalog;
use golden_core::expr::{parse, Constant, Expr, Func};
use golden_core::fields::{partial, sample_points, OneOneField};
use golden_core::golden::{check_golden, golden_of, product_of, purity_residual, ValidationConfig};
use golden_core::linalg::Mat;
use golden_core::tape::Tape;
use proptest::prelude::*;

const COORDS: [&str; 3] = ["x", "y", "z"];

fn coords() -> Vec<String> {
    COORDS.iter().map(|s| s.to_string()).collect()
}

/// Arbitrary trees in the shape the parser produces.
fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0..100.0f64).prop_map(Expr::lit),
        (0usize..3).prop_map(Expr::var),
        prop_oneof![Just(Constant::Pi), Just(Constant::Sqrt5), Just(Constant::Phi), Just(Constant::PhiBar)]
            .prop_map(Expr::constant),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let func = prop_oneof![
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Tan),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sqrt),
            Just(Func::Abs)
        ];
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -3i32..4).prop_map(|(a, k)| Expr::pow(a, k as f64)),
            (func, inner).prop_map(|(f, a)| Expr::call(f, a)),
        ]
    })
}

/// Smooth expressions over `[-1, 1]^3`, built as text.
fn smooth_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("z".to_string()),
        (-2.0..2.0f64).prop_map(|c| format!("({c:.4})")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (1 + ({b})^2))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("exp(cos({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(2 + sin({a}))")),
            inner.prop_map(|a| format!("log(1 + ({a})^2)")),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(e in any_expr()) {
        let text = e.display(&coords()).to_string();
        prop_assert_eq!(parse(&text, &COORDS).unwrap(), e);
    }

    #[test]
    fn tape_matches_tree(e in any_expr(), p in point()) {
        let tree = e.evaluate::<f64>(&p);
        let tape = Tape::compile(core::slice::from_ref(&e)).and_then(|t| t.eval::<f64>(&p));
        match (tree, tape) {
            (Ok(v), Some(t)) => prop_assert_eq!(v.to_bits(), t[0].to_bits()),
            (Ok(_), None) => {}
            (Err(_), t) => prop_assert!(t.is_none()),
        }
    }

    #[test]
    fn ad_partials_match_central_differences(text in smooth_text(), p in point(), i in 0usize..3) {
        let e = parse(&text, &COORDS).unwrap();
        let ad = partial(&e, i, &p).unwrap();
        let h = 1e-5;
        let (mut lo, mut hi) = (p.clone(), p.clone());
        lo[i] -= h;
        hi[i] += h;
        let fd = (e.evaluate::<f64>(&hi).unwrap() - e.evaluate::<f64>(&lo).unwrap()) / (2.0 * h);
        prop_assert!((ad - fd).abs() <= 1e-5 * ad.abs().max(1.0), "{} at {:?}: {} vs {}", text, p, ad, fd);
    }

    #[test]
    fn golden_and_product_correspondence_round_trips(a in proptest::collection::vec(-3.0..3.0f64, 9)) {
        let m = OneOneField::constant(&Mat::from_rows(3, 3, a.clone()));
        let p = [0.0; 3];
        let back = golden_of(&product_of(&m)).eval::<f64>(&p).unwrap();
        let back2 = product_of(&golden_of(&m)).eval::<f64>(&p).unwrap();
        let orig = Mat::from_rows(3, 3, a);
        prop_assert!(back.sub(&orig).max_abs() < 1e-12);
        prop_assert!(back2.sub(&orig).max_abs() < 1e-12);
    }

    #[test]
    fn generated_structures_are_golden_and_pure(n in 1usize..4, r_off in 0usize..3, seed in any::<u64>()) {
        let r = 1 + r_off % n;
        let e = catalog::random_pure_structure(n, r, seed).unwrap();
        let pair = e.pair(&ValidationConfig::default()).unwrap();
        prop_assert_eq!(pair.ranks(), (r, n - r));
        for p in sample_points(&e.chart, 5, seed) {
            prop_assert!(check_golden(pair.phi(), &p).unwrap() < 1e-10);
            prop_assert!(purity_residual(pair.phi(), pair.metric(), &p).unwrap().max() < 1e-10);
        }
    }
}
