//! Differential invariants, annihilation checks, Jacobian/adjoint systems
//! and the counting formulas.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{determining_system, invariant_coordinates, DiffOperator, MixedConvention};
use crate::lie::{coefficient_matrix, symbolic_rank, SymbolicMatrix};
use crate::symbolic::{partial, Expr, RatFunc, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    T,
    K,
    L,
    /// Companion functions that are *not* invariant; kept for negative checks.
    J,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::T => "T",
            Family::K => "K",
            Family::L => "L",
            Family::J => "J",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariant {
    pub family: Family,
    pub indices: Vec<usize>,
    pub expr: Expr,
}

impl Invariant {
    fn new(family: Family, indices: Vec<usize>, expr: Expr) -> Result<Self> {
        Ok(Invariant { family, indices, expr: expr.normalize()? })
    }

    /// `T_ij = A_ij A_j / A_i`.
    pub fn t(i: usize, j: usize) -> Result<Self> {
        let e = &(&Expr::a(i, &[j]) * &Expr::a(j, &[])) / &Expr::a(i, &[]);
        Invariant::new(Family::T, vec![i, j], e)
    }

    /// `K_ij = A_{i,jj} A_j / A_ij + A_jj`.
    pub fn k(i: usize, j: usize) -> Result<Self> {
        let e = &(&(&Expr::a(i, &[j, j]) * &Expr::a(j, &[])) / &Expr::a(i, &[j])) + &Expr::a(j, &[j]);
        Invariant::new(Family::K, vec![i, j], e)
    }

    /// `L_ijk = A_{i,jk} A_j A_k / A_i`.
    pub fn l(i: usize, j: usize, k: usize) -> Result<Self> {
        let e = &Expr::mul([Expr::a(i, &[j, k]), Expr::a(j, &[]), Expr::a(k, &[])]) / &Expr::a(i, &[]);
        Invariant::new(Family::L, vec![i, j, k], e)
    }

    /// `J_ij = A_{i,ij} A_i A_j / A_ij − 2 A_ii`.
    pub fn j(i: usize, j: usize) -> Result<Self> {
        let e = &(&Expr::mul([Expr::a(i, &[i, j]), Expr::a(i, &[]), Expr::a(j, &[])]) / &Expr::a(i, &[j]))
            - &(&Expr::int(2) * &Expr::a(i, &[i]));
        Invariant::new(Family::J, vec![i, j], e)
    }

    pub fn name(&self) -> String {
        let idx: String = self.indices.iter().map(|i| i.to_string()).collect();
        format!("{}{idx}", self.family)
    }

    pub fn latex(&self) -> String {
        let idx: String = self.indices.iter().map(|i| i.to_string()).collect();
        format!("{}_{{{idx}}} = {}", self.family, self.expr.latex())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family,
            "indices": self.indices,
            "expression": self.expr.to_string(),
        })
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name(), self.expr)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if n > crate::symbolic::MAX_DIMENSION {
        return Err(Error::IndexOutOfRange { index: n, n: crate::symbolic::MAX_DIMENSION });
    }
    Ok(())
}

/// Ordered pairs `(i, j)`, `i ≠ j`: for each `i < j`, `(i, j)` then `(j, i)`.
pub fn ordered_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1));
    for i in 1..=n {
        for j in i + 1..=n {
            out.push((i, j));
            out.push((j, i));
        }
    }
    out
}

/// Validates a declared set of identically vanishing `A_ij`.
pub fn check_vanishing(n: usize, vanishing: &BTreeSet<(usize, usize)>) -> Result<()> {
    for &(i, j) in vanishing {
        if i == j || i == 0 || j == 0 || i > n || j > n {
            return Err(Error::InvalidArgument(format!("vanishing pair ({i},{j}) for n = {n}")));
        }
    }
    Ok(())
}

/// The `n(n−1) − p` first-order invariants `T_ij`, skipping pairs declared
/// vanishing. Each is checked against the first-order determining system.
pub fn first_order_invariants(n: usize, vanishing: &BTreeSet<(usize, usize)>) -> Result<Vec<Invariant>> {
    check_n(n)?;
    check_vanishing(n, vanishing)?;
    let out: Vec<Invariant> = ordered_pairs(n)
        .into_iter()
        .filter(|p| !vanishing.contains(p))
        .map(|(i, j)| Invariant::t(i, j))
        .collect::<Result<_>>()?;
    verify_all(&out, &system_ops(n, 1, MixedConvention::Symmetric)?)?;
    Ok(out)
}

/// Second-order invariants with the count they are known to reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSet {
    pub n: usize,
    pub invariants: Vec<Invariant>,
    /// Set for `n ≥ 4`, where the list is a fundamental subset only.
    pub fundamental_subset: bool,
}

/// `T_ij`, `K_ij` and (for `n ≥ 3`) `L_ijk`, each verified annihilated by
/// the second-order determining system before being returned.
pub fn second_order_invariants(n: usize) -> Result<InvariantSet> {
    second_order_invariants_vanishing(n, &BTreeSet::new())
}

/// As [`second_order_invariants`], omitting `T_ij` and `K_ij` for pairs
/// declared vanishing, and `L_ijk` when `A_ij` or `A_ik` vanishes (then
/// `A_{i,jk}` vanishes as well).
pub fn second_order_invariants_vanishing(n: usize, vanishing: &BTreeSet<(usize, usize)>) -> Result<InvariantSet> {
    check_n(n)?;
    check_vanishing(n, vanishing)?;
    let pairs: Vec<(usize, usize)> = ordered_pairs(n).into_iter().filter(|p| !vanishing.contains(p)).collect();
    let mut out = Vec::new();
    for &(i, j) in &pairs {
        out.push(Invariant::t(i, j)?);
    }
    for &(i, j) in &pairs {
        out.push(Invariant::k(i, j)?);
    }
    for i in 1..=n {
        for j in 1..=n {
            for k in j + 1..=n {
                if i == j || i == k || vanishing.contains(&(i, j)) || vanishing.contains(&(i, k)) {
                    continue;
                }
                out.push(Invariant::l(i, j, k)?);
            }
        }
    }
    verify_all(&out, &system_ops(n, 2, MixedConvention::Symmetric)?)?;
    Ok(InvariantSet { n, invariants: out, fundamental_subset: n >= 4 })
}

fn system_ops(n: usize, order: usize, conv: MixedConvention) -> Result<Vec<DiffOperator>> {
    Ok(determining_system(n, order, conv)?.into_iter().map(|s| s.op).collect())
}

fn verify_all(invs: &[Invariant], ops: &[DiffOperator]) -> Result<()> {
    for inv in invs {
        let a = verify_annihilated(&inv.expr, ops)?;
        if !a.annihilated {
            return Err(Error::Inconsistency(format!("{} is not annihilated", inv.name())));
        }
    }
    Ok(())
}

/// Result of applying a list of operators to a function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annihilation {
    pub annihilated: bool,
    /// `(operator index, residual)` for each operator that does not
    /// annihilate the function.
    pub residuals: Vec<(usize, Expr)>,
}

pub fn verify_annihilated(f: &Expr, ops: &[DiffOperator]) -> Result<Annihilation> {
    let mut residuals = Vec::new();
    for (k, op) in ops.iter().enumerate() {
        let r = op.apply(f)?;
        if !r.is_zero() {
            residuals.push((k, r));
        }
    }
    Ok(Annihilation { annihilated: residuals.is_empty(), residuals })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZerothOrderReport {
    pub n: usize,
    pub variables: usize,
    pub rank: usize,
    pub invariants: usize,
}

/// Rank of the unprolonged determining system `{∂/∂x^i} ∪ {A_i ∂/∂A_i}`
/// on its `2n` variables; the invariant count is their difference.
pub fn zeroth_order_report(n: usize) -> Result<ZerothOrderReport> {
    check_n(n)?;
    let ops = system_ops(n, 0, MixedConvention::Symmetric)?;
    let coords = invariant_coordinates(n, 0)?;
    let rank = symbolic_rank(&coefficient_matrix(&ops, &coords)?)?;
    Ok(ZerothOrderReport { n, variables: coords.len(), rank, invariants: coords.len() - rank })
}

/// Jacobian of a list of functions with respect to the given coordinates.
pub fn jacobian_matrix(fs: &[Invariant], coords: &[Var]) -> Result<SymbolicMatrix> {
    let mut entries = Vec::with_capacity(fs.len());
    for f in fs {
        entries.push(coords.iter().map(|v| partial(&f.expr, v)).collect::<Result<Vec<_>>>()?);
    }
    Ok(SymbolicMatrix { row_labels: fs.iter().map(Invariant::name).collect(), columns: coords.to_vec(), entries })
}

/// A Jacobian system solved for its pivot derivatives, together with the
/// coefficients `U_{s,t}` of the equivalent adjoint system
/// `du_s = Σ_t U_{s,t} dx_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointSystem {
    pub pivots: Vec<Var>,
    pub nonpivots: Vec<Var>,
    /// `u[s][t]`.
    pub u: Vec<Vec<Expr>>,
    /// `Δ_t = Σ_k (P⁻¹)_{tk} op_k`, where `P` is the pivot submatrix.
    pub deltas: Vec<DiffOperator>,
    /// Pivot submatrix `P[k][t]`: coefficient of `∂/∂x_t` in operator `k`.
    pub pivot_matrix: Vec<Vec<Expr>>,
}

impl AdjointSystem {
    pub fn tau(&self) -> usize {
        self.pivots.len()
    }

    pub fn p(&self) -> usize {
        self.nonpivots.len()
    }

    /// `M_uᵀ`: row `t`, column `s`.
    pub fn m_u_transpose(&self) -> SymbolicMatrix {
        SymbolicMatrix {
            row_labels: self.pivots.iter().map(|v| v.to_string()).collect(),
            columns: self.nonpivots.clone(),
            entries: (0..self.tau()).map(|t| (0..self.p()).map(|s| self.u[s][t].clone()).collect()).collect(),
        }
    }

    /// `∂/∂x_t + Σ_s U_{s,t} ∂/∂u_s`.
    pub fn rebuild(&self, t: usize, n: usize) -> Result<DiffOperator> {
        let mut terms = vec![(self.pivots[t].clone(), Expr::one())];
        for (s, v) in self.nonpivots.iter().enumerate() {
            terms.push((v.clone(), self.u[s][t].clone()));
        }
        DiffOperator::from_terms(n, terms)
    }

    /// Checks that every rebuilt `Δ_t` equals the corresponding combination
    /// of the original operators; for a diagonal pivot block that is
    /// `op_t / P_tt`.
    pub fn check_reconstruction(&self, ops: &[DiffOperator]) -> Result<bool> {
        let n = ops.first().map_or(2, DiffOperator::n);
        let diagonal =
            (0..self.tau()).all(|k| (0..self.tau()).all(|t| k == t || self.pivot_matrix[k][t].is_canonical_zero()));
        for t in 0..self.tau() {
            let rebuilt = self.rebuild(t, n)?;
            let expected = if diagonal {
                ops[t].scale(&(&Expr::one() / &self.pivot_matrix[t][t]))?
            } else {
                self.deltas[t].clone()
            };
            if rebuilt != expected {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Solves `ops` for the derivatives along `pivot_order`.
///
/// `nonpivot_order` fixes the column order of `U`; when `None` the
/// remaining coordinates are taken in global order.
pub fn jacobian_adjoint(
    ops: &[DiffOperator],
    pivot_order: &[Var],
    nonpivot_order: Option<&[Var]>,
) -> Result<AdjointSystem> {
    let tau = pivot_order.len();
    if ops.len() != tau {
        return Err(Error::InvalidArgument(format!("{} operators for {tau} pivots", ops.len())));
    }
    let support: BTreeSet<Var> = ops.iter().flat_map(|o| o.targets().cloned()).collect();
    let pivot_set: BTreeSet<&Var> = pivot_order.iter().collect();
    let nonpivots: Vec<Var> = match nonpivot_order {
        Some(np) => {
            for v in &support {
                if !pivot_set.contains(v) && !np.contains(v) {
                    return Err(Error::MissingCoordinate(v.to_string()));
                }
            }
            np.to_vec()
        }
        None => support.iter().filter(|v| !pivot_set.contains(v)).cloned().collect(),
    };
    let p_mat: Vec<Vec<Expr>> = ops
        .iter()
        .map(|o| pivot_order.iter().map(|v| o.coefficient(v).cloned().unwrap_or_else(Expr::zero)).collect())
        .collect();
    let inv = invert(&p_mat)?;
    let mut deltas = Vec::with_capacity(tau);
    for row in &inv {
        let mut d = DiffOperator::zero(ops.first().map_or(2, DiffOperator::n));
        for (k, c) in row.iter().enumerate() {
            if !c.is_canonical_zero() {
                d = d.add(&ops[k].scale(c)?)?;
            }
        }
        deltas.push(d);
    }
    let u = nonpivots
        .iter()
        .map(|v| deltas.iter().map(|d| d.coefficient(v).cloned().unwrap_or_else(Expr::zero)).collect())
        .collect();
    Ok(AdjointSystem { pivots: pivot_order.to_vec(), nonpivots, u, deltas, pivot_matrix: p_mat })
}

/// Inverse over the rational-function field by Gauss–Jordan elimination.
/// The result is indexed `[t][k]` with `Σ_k inv[t][k] P[k][t'] = δ_tt'`.
fn invert(p: &[Vec<Expr>]) -> Result<Vec<Vec<Expr>>> {
    let n = p.len();
    // Reduce [Pᵀ | I] to [I | (Pᵀ)⁻¹].
    let mut a: Vec<Vec<RatFunc>> = Vec::with_capacity(n);
    for t in 0..n {
        let mut row = Vec::with_capacity(2 * n);
        for k in 0..n {
            row.push(p[k][t].rat()?.clone());
        }
        for k in 0..n {
            row.push(if k == t { RatFunc::one() } else { RatFunc::zero() });
        }
        a.push(row);
    }
    for c in 0..n {
        let piv = (c..n).filter(|&r| !a[r][c].is_zero()).min_by_key(|&r| a[r][c].size()).ok_or(Error::SingularPivot)?;
        a.swap(c, piv);
        let inv = a[c][c].inv()?;
        for x in a[c].iter_mut() {
            *x = x.mul(&inv);
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for k in 0..2 * n {
                if !a[c][k].is_zero() {
                    a[r][k] = a[r][k].sub(&f.mul(&a[c][k]));
                }
            }
        }
    }
    // (Pᵀ)⁻¹ = (P⁻¹)ᵀ, so (P⁻¹)[t][k] = a[k][n + t].
    Ok((0..n).map(|t| (0..n).map(|k| Expr::from_rat(a[k][n + t].clone())).collect()).collect())
}

/// Pivots `A_1..A_n, A_11..A_nn` of the second-order system.
pub fn second_order_pivots(n: usize) -> Vec<Var> {
    (1..=n).map(Var::coeff).chain((1..=n).map(|i| Var::jet(i, &[i]))).collect()
}

/// Non-pivot order reproducing the classical tables: the second-order
/// coordinates of `A_1`, then `A2_1`, then the rest in global order. For
/// `n = 2` this is `(A1_12, A1_22, A2_1, A1_2, A2_11, A2_12)`.
pub fn second_order_nonpivots(n: usize) -> Result<Vec<Var>> {
    let pivots: BTreeSet<Var> = second_order_pivots(n).into_iter().collect();
    let rest: Vec<Var> = invariant_coordinates(n, 2)?.into_iter().filter(|v| !pivots.contains(v)).collect();
    let b1 = Var::jet(2, &[1]);
    let (first, others): (Vec<Var>, Vec<Var>) =
        rest.into_iter().partition(|v| v.as_jet().is_some_and(|j| j.base() == 1 && j.order() == 2));
    Ok(first.into_iter().chain([b1.clone()]).chain(others.into_iter().filter(|v| *v != b1)).collect())
}

/// `n(n−1) − p`.
pub fn count_first_order(n: usize, p: usize) -> Result<u64> {
    check_count_n(n)?;
    let total = n as u64 * (n as u64 - 1);
    if p as u64 > total {
        return Err(Error::InvalidArgument(format!("p = {p} exceeds n(n-1) = {total}")));
    }
    Ok(total - p as u64)
}

/// `n(n² + n − 2)/2`, the number of `T`, `K` and `L` functions.
pub fn count_tkl(n: usize) -> Result<u64> {
    check_count_n(n)?;
    let n = n as u64;
    Ok(n * (n * n + n - 2) / 2)
}

/// `n(2^{n−1} + n − 2)`.
pub fn conjectured_m2(n: usize) -> Result<u64> {
    check_count_n(n)?;
    if n > 60 {
        return Err(Error::InvalidArgument(format!("n = {n} overflows the count")));
    }
    let n = n as u64;
    Ok(n * ((1u64 << (n - 1)) + n - 2))
}

/// `Σ_{j=2}^{n} j·C(n,j) = n(2^{n−1} − 1)`, checked in exact arithmetic.
pub fn binomial_identity_check(n: usize) -> Result<bool> {
    check_count_n(n)?;
    let mut lhs = BigInt::zero();
    let mut c = BigInt::one(); // C(n, 0)
    for j in 1..=n {
        c = c * BigInt::from(n - j + 1) / BigInt::from(j);
        if j >= 2 {
            lhs += &c * BigInt::from(j);
        }
    }
    let rhs = BigInt::from(n) * ((BigInt::one() << (n - 1)) - BigInt::one());
    Ok(lhs == rhs)
}

/// `n²(n+3)/2`, the number of variables of the second-order system.
pub fn second_order_coordinate_count(n: usize) -> Result<u64> {
    check_count_n(n)?;
    let n = n as u64;
    Ok(n * n * (n + 3) / 2)
}

fn check_count_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::DimensionTooSmall(n))
    } else {
        Ok(())
    }
}
