use proptest::prelude::*;

use vfinv_core::symbolic::{diff_total, eval_numeric, is_zero, partial, Func, Point};
use vfinv_core::{parse_expr, Expr, Var};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        (1usize..=2).prop_map(Expr::x),
        (1usize..=2).prop_map(|b| Expr::a(b, &[])),
        (1usize..=2, 1usize..=2).prop_map(|(b, d)| Expr::a(b, &[d])),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, &b * &b + Expr::one())),
            (inner.clone(), -2i32..=3).prop_map(|(a, k)| Expr::pow(&a * &a + Expr::int(2), k)),
            inner.prop_map(|a| Expr::func(Func::Exp, a)),
            // Bounded arguments keep sin and cos well conditioned.
            (prop_oneof![Just(Func::Sin), Just(Func::Cos)], leaf(), leaf())
                .prop_map(|(f, a, b)| Expr::func(f, &a * &b)),
        ]
    })
}

/// Rational expressions only, so the canonical form decides equality exactly.
fn rational_expr() -> impl Strategy<Value = Expr> {
    expr().prop_filter("rational", |e| !e.has_funcs())
}

fn point() -> impl Strategy<Value = Point> {
    proptest::collection::vec(0.5f64..2.0, 8).prop_map(|v| {
        let vars = [
            Var::x(1),
            Var::x(2),
            Var::coeff(1),
            Var::coeff(2),
            Var::jet(1, &[1]),
            Var::jet(1, &[2]),
            Var::jet(2, &[1]),
            Var::jet(2, &[2]),
        ];
        vars.into_iter().zip(v).collect()
    })
}

fn same(a: &Expr, b: &Expr) -> bool {
    is_zero(&(a - b)).zero
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_derivatives_commute(e in expr()) {
        let d12 = diff_total(&diff_total(&e, 1).unwrap(), 2).unwrap();
        let d21 = diff_total(&diff_total(&e, 2).unwrap(), 1).unwrap();
        prop_assert!(same(&d12, &d21));
    }

    #[test]
    fn leibniz_rule(f in expr(), g in expr(), k in 1usize..=2) {
        let lhs = diff_total(&(&f * &g), k).unwrap();
        let rhs = &diff_total(&f, k).unwrap() * &g + &f * &diff_total(&g, k).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn partials_commute_exactly(e in rational_expr()) {
        let (u, v) = (Var::coeff(1), Var::x(2));
        let a = partial(&partial(&e, &u).unwrap(), &v).unwrap().normalize().unwrap();
        let b = partial(&partial(&e, &v).unwrap(), &u).unwrap().normalize().unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn normalize_is_idempotent(e in expr()) {
        let once = e.normalize().unwrap();
        prop_assert_eq!(once.normalize().unwrap(), once);
    }

    #[test]
    fn normalize_preserves_values(e in expr(), pts in proptest::collection::vec(point(), 100)) {
        let n = e.normalize().unwrap();
        for p in &pts {
            let (Ok(a), Ok(b)) = (eval_numeric(&e, p), eval_numeric(&n, p)) else { continue };
            if !a.is_finite() {
                continue;
            }
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} vs {}: {} != {}", e, n, a, b);
        }
    }

    #[test]
    fn print_parse_round_trip(e in expr()) {
        let text = e.to_string();
        let back = parse_expr(&text, 2).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        prop_assert_eq!(back.normalize().unwrap(), e.normalize().unwrap());
        let canonical = e.normalize().unwrap();
        let again = parse_expr(&canonical.to_string(), 2).unwrap().normalize().unwrap();
        prop_assert_eq!(again, canonical);
    }
}

#[test]
fn rejects_malformed_input() {
    for bad in ["", "1 +", "(x1", "A3", "x1 ** 2", "foo(x1)", "A1_4", "x1^y"] {
        assert!(parse_expr(bad, 2).is_err(), "{bad}");
    }
}
