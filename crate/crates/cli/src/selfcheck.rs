//! Golden checks bundled with the binary.

use std::collections::BTreeSet;

use serde_json::json;

use vfinv_core::invariants::{
    conjectured_m2, count_tkl, first_order_invariants, second_order_invariants, verify_annihilated,
    zeroth_order_report, Invariant,
};
use vfinv_core::jet::{
    build_generator, determining_system, invariant_coordinates, prolong, xi_decompose, DiffOperator, MixedConvention,
};
use vfinv_core::lie::{coefficient_matrix, commutator, is_complete_system, symbolic_rank};
use vfinv_core::{Expr, Result, Var};

fn ops(n: usize, order: usize, conv: MixedConvention) -> Result<Vec<DiffOperator>> {
    Ok(determining_system(n, order, conv)?.into_iter().map(|s| s.op).collect())
}

fn golden_operators() -> Result<bool> {
    let d = xi_decompose(&prolong(&build_generator(2)?, 1, MixedConvention::Symmetric)?)?;
    let a = |b, dirs: &[usize]| Expr::a(b, dirs);
    let v1 = DiffOperator::from_terms(
        2,
        [(Var::coeff(1), a(1, &[])), (Var::jet(1, &[2]), a(1, &[2])), (Var::jet(2, &[1]), -&a(2, &[1]))],
    )?;
    let v2 = DiffOperator::from_terms(
        2,
        [(Var::coeff(2), a(2, &[])), (Var::jet(1, &[2]), -&a(1, &[2])), (Var::jet(2, &[1]), a(2, &[1]))],
    )?;
    Ok(d.get(1, 1) == v1 && d.get(2, 1) == v2)
}

fn golden_invariants() -> Result<bool> {
    let none = BTreeSet::new();
    let first = [(2, 2), (3, 6)];
    for (n, want) in first {
        if first_order_invariants(n, &none)?.len() != want {
            return Ok(false);
        }
    }
    // Both lists are verified against their determining systems on construction.
    Ok(second_order_invariants(2)?.invariants.len() == 4 && second_order_invariants(3)?.invariants.len() == 15)
}

fn first_order_structure() -> Result<bool> {
    for n in 2..=5 {
        let o = ops(n, 1, MixedConvention::Symmetric)?;
        if symbolic_rank(&coefficient_matrix(&o, &invariant_coordinates(n, 1)?)?)? != n {
            return Ok(false);
        }
        for i in 0..n {
            for j in i + 1..n {
                if !commutator(&o[i], &o[j])?.is_empty() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn slot_brackets() -> Result<bool> {
    for n in [2, 3] {
        let o = ops(n, 2, MixedConvention::OrderedPairs)?;
        for i in 0..n {
            if commutator(&o[i], &o[n + i])? != o[n + i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn incomplete_second_order_system() -> Result<bool> {
    let c = is_complete_system(&ops(2, 2, MixedConvention::OrderedPairs)?)?;
    Ok(!c.complete && c.witness.is_some_and(|w| !w.commutator.is_empty()))
}

fn negative_results() -> Result<bool> {
    let o = ops(2, 2, MixedConvention::Symmetric)?;
    for (i, j) in [(1, 2), (2, 1)] {
        if verify_annihilated(&Invariant::j(i, j)?.expr, &o)?.annihilated {
            return Ok(false);
        }
    }
    for n in 2..=5 {
        if zeroth_order_report(n)?.invariants != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn counts() -> Result<bool> {
    Ok(conjectured_m2(4)? == 40
        && conjectured_m2(5)? == 95
        && (2..=20u64).all(|n| count_tkl(n as usize).ok() == Some(n * (n * n + n - 2) / 2)))
}

type Check = (&'static str, fn() -> Result<bool>);

/// Runs every check; returns the report and whether all passed.
pub fn run(as_json: bool) -> (String, bool) {
    let checks: [Check; 7] = [
        ("golden first-order operators", golden_operators),
        ("golden invariant lists", golden_invariants),
        ("first-order rank and commutators", first_order_structure),
        ("slot brackets", slot_brackets),
        ("second-order system incomplete", incomplete_second_order_system),
        ("non-invariants and zeroth order", negative_results),
        ("counting formulas", counts),
    ];
    let results: Vec<(&str, bool, Option<String>)> = checks
        .iter()
        .map(|(name, f)| match f() {
            Ok(ok) => (*name, ok, None),
            Err(e) => (*name, false, Some(e.to_string())),
        })
        .collect();
    let passed = results.iter().all(|r| r.1);
    let out = if as_json {
        let list: Vec<_> =
            results.iter().map(|(name, ok, err)| json!({"name": name, "pass": ok, "error": err})).collect();
        let mut s = serde_json::to_string_pretty(&json!({"passed": passed, "checks": list})).expect("serializes");
        s.push('\n');
        s
    } else {
        results
            .iter()
            .map(|(name, ok, err)| match err {
                Some(e) => format!("FAIL {name}: {e}\n"),
                None => format!("{} {name}\n", if *ok { "PASS" } else { "FAIL" }),
            })
            .collect()
    };
    (out, passed)
}
