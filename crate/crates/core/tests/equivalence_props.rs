use std::collections::BTreeMap;

use proptest::prelude::*;

use vfinv_core::equivalence::{apply_transformation, orbit_equivalent, Equation, Mode, PointTransformation, Sampling};
use vfinv_core::invariants::Invariant;
use vfinv_core::symbolic::is_zero;
use vfinv_core::{Expr, Var};

const CORPUS: &[[&str; 2]] =
    &[["x2", "x1"], ["x1 * x2 + 1", "x1^2 + x2"], ["x1 + x2^2 + 1", "3"], ["2", "x1"], ["x1 / (x2 + 1)", "x2^2 - x1"]];

fn equation() -> impl Strategy<Value = Equation> {
    (0..CORPUS.len()).prop_map(|k| Equation::parse(2, &CORPUS[k]).unwrap())
}

/// `y ↦ (p/q) y + r/4` per component, `p ≠ 0`.
fn affine() -> impl Strategy<Value = PointTransformation> {
    let component = (prop_oneof![-4i64..=-1, 1i64..=4], 1i64..=3, -4i64..=4);
    (component.clone(), component).prop_map(|(a, b)| {
        let c = |(p, q, r): (i64, i64, i64), i: usize| format!("{p} / {q} * y{i} + {r} / 4");
        PointTransformation::parse(&[&c(a, 1), &c(b, 2)], vec![(1.0, 2.0); 2]).unwrap()
    })
}

fn same(a: &Expr, b: &Expr) -> bool {
    is_zero(&(a - b)).zero
}

fn same_equation(a: &Equation, b: &Equation) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| same(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn composition_is_a_group_action(eq in equation(), theta in affine(), phi in affine()) {
        let stepwise = apply_transformation(&apply_transformation(&eq, &theta).unwrap(), &phi).unwrap();
        let composite = apply_transformation(&eq, &PointTransformation::compose(&theta, &phi).unwrap()).unwrap();
        prop_assert!(same_equation(&stepwise, &composite));
    }

    #[test]
    fn identity_acts_trivially(eq in equation()) {
        let id = PointTransformation::identity(2).unwrap();
        prop_assert!(same_equation(&apply_transformation(&eq, &id).unwrap(), &eq));
    }

    #[test]
    fn t_values_transform_as_invariants(eq in equation(), psi in affine()) {
        let b = apply_transformation(&eq, &psi).unwrap();
        let map: BTreeMap<Var, Expr> =
            psi.components().iter().enumerate().map(|(k, c)| (Var::x(k + 1), c.clone())).collect();
        for (i, j) in [(1, 2), (2, 1)] {
            let t = Invariant::t(i, j).unwrap().expr;
            let on_b = b.evaluate(&t).unwrap();
            let pulled = eq.evaluate(&t).unwrap().substitute(&map).unwrap();
            prop_assert!(same(&on_b, &pulled), "T{}{}", i, j);
        }
    }

    #[test]
    fn vanishing_pattern_is_preserved(eq in equation(), psi in affine()) {
        let b = apply_transformation(&eq, &psi).unwrap();
        prop_assert_eq!(eq.vanishing_pattern().unwrap(), b.vanishing_pattern().unwrap());
    }

    #[test]
    fn orbit_test_is_reflexive_and_symmetric(a in equation(), b in equation()) {
        for mode in [Mode::Symbolic, Mode::Numeric] {
            prop_assert!(orbit_equivalent(&a, &a, mode, Sampling::default()).unwrap().equivalent);
            let ab = orbit_equivalent(&a, &b, mode, Sampling::default()).unwrap().equivalent;
            let ba = orbit_equivalent(&b, &a, mode, Sampling::default()).unwrap().equivalent;
            prop_assert_eq!(ab, ba);
        }
    }
}

#[test]
fn modes_agree_on_the_corpus() {
    for a in CORPUS {
        for b in CORPUS {
            let (a, b) = (Equation::parse(2, a).unwrap(), Equation::parse(2, b).unwrap());
            let s = orbit_equivalent(&a, &b, Mode::Symbolic, Sampling::default()).unwrap();
            let n = orbit_equivalent(&a, &b, Mode::Numeric, Sampling::default()).unwrap();
            assert_eq!(s.equivalent, n.equivalent, "{:?} vs {:?}", a.coeffs(), b.coeffs());
        }
    }
}
