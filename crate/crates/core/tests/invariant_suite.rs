use std::collections::{BTreeMap, BTreeSet};

use vfinv_core::invariants::{
    count_first_order, count_tkl, first_order_invariants, jacobian_adjoint, jacobian_matrix, ordered_pairs,
    second_order_invariants, second_order_invariants_vanishing, second_order_nonpivots, second_order_pivots,
    verify_annihilated, Family, Invariant,
};
use vfinv_core::jet::{determining_system, invariant_coordinates, DiffOperator, MixedConvention};
use vfinv_core::lie::symbolic_rank;
use vfinv_core::{Expr, Var};

fn system(n: usize, order: usize, conv: MixedConvention) -> Vec<DiffOperator> {
    determining_system(n, order, conv).unwrap().into_iter().map(|s| s.op).collect()
}

#[test]
fn cardinalities_match_counts() {
    for n in 2..=6 {
        let set = second_order_invariants(n).unwrap();
        assert_eq!(set.invariants.len() as u64, count_tkl(n).unwrap(), "n={n}");
        assert_eq!(set.fundamental_subset, n >= 4);
        let firsts = first_order_invariants(n, &BTreeSet::new()).unwrap();
        assert_eq!(firsts.len() as u64, count_first_order(n, 0).unwrap());
    }
}

#[test]
fn vanishing_pairs_reduce_first_order_count() {
    let n = 4;
    let pairs = ordered_pairs(n);
    for mask in [0b1u32, 0b101, 0b1111, 0b1010_1010_1010] {
        let vanishing: BTreeSet<(usize, usize)> =
            pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, p)| *p).collect();
        let got = first_order_invariants(n, &vanishing).unwrap();
        assert_eq!(got.len() as u64, count_first_order(n, vanishing.len()).unwrap(), "mask {mask:b}");
        assert!(got.iter().all(|inv| !vanishing.contains(&(inv.indices[0], inv.indices[1]))));
    }
}

#[test]
fn all_families_annihilated_up_to_four() {
    for n in 2..=4 {
        let ops = system(n, 2, MixedConvention::Symmetric);
        for inv in second_order_invariants(n).unwrap().invariants {
            let a = verify_annihilated(&inv.expr, &ops).unwrap();
            assert!(a.annihilated, "n={n} {}", inv.name());
        }
    }
}

#[test]
fn vanishing_pair_sets_stay_invariant() {
    let vanishing: BTreeSet<(usize, usize)> = [(1, 2), (3, 1)].into();
    let set = second_order_invariants_vanishing(3, &vanishing).unwrap();
    assert!(set.invariants.iter().all(|inv| inv.family != Family::L || inv.indices[0] == 2));
    assert_eq!(set.invariants.iter().filter(|i| i.family == Family::T).count(), 4);
}

#[test]
fn second_order_families_are_functionally_independent() {
    for n in 2..=4 {
        let invs = second_order_invariants(n).unwrap().invariants;
        let jac = jacobian_matrix(&invs, &invariant_coordinates(n, 2).unwrap()).unwrap();
        assert_eq!(symbolic_rank(&jac).unwrap(), invs.len(), "n={n}");
    }
}

#[test]
fn invariants_are_first_integrals_of_the_adjoint_system() {
    for n in [2, 3] {
        let ops = system(n, 2, MixedConvention::Symmetric);
        let adj = jacobian_adjoint(&ops, &second_order_pivots(n), Some(&second_order_nonpivots(n).unwrap())).unwrap();
        let deltas: Vec<DiffOperator> = (0..adj.tau()).map(|t| adj.rebuild(t, n).unwrap()).collect();
        for inv in second_order_invariants(n).unwrap().invariants {
            assert!(verify_annihilated(&inv.expr, &deltas).unwrap().annihilated, "n={n} {}", inv.name());
        }
    }
}

#[test]
fn j_functions_fail_even_on_their_zero_set() {
    let n = 2;
    for conv in [MixedConvention::Symmetric, MixedConvention::OrderedPairs] {
        let ops = system(n, 2, conv);
        for (i, j) in [(1, 2), (2, 1)] {
            let jf = Invariant::j(i, j).unwrap();
            let a = verify_annihilated(&jf.expr, &ops).unwrap();
            assert!(!a.annihilated, "J{i}{j} {conv:?}");
            // Solve J_ij = 0 for A_ii and restrict the residuals to that set.
            let on_zero_set = &(&Expr::mul([Expr::a(i, &[i, j]), Expr::a(i, &[]), Expr::a(j, &[])])
                / &Expr::a(i, &[j]))
                / &Expr::int(2);
            let map: BTreeMap<Var, Expr> = [(Var::jet(i, &[i]), on_zero_set)].into();
            let restricted: Vec<Expr> = a.residuals.iter().map(|(_, r)| r.substitute(&map).unwrap()).collect();
            assert!(restricted.iter().any(|r| !r.is_canonical_zero()), "J{i}{j} {conv:?}");
        }
    }
}
