//! Equivalence-group generator, its prolongations, and the decomposition of
//! a prolonged generator into the operators multiplying each formal symbol
//! `ξ^{i(j)}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbolic::{diff_total, partial, split_linear, Expr, JetVar, Node, Var, XiSym};

/// How a prolongation coefficient on a mixed coordinate `A_{i,jk}` (`j ≠ k`)
/// is accumulated.
///
/// `Symmetric` is the standard jet prolongation: the coefficient of
/// `∂/∂A_{i,jk}` is computed once. `OrderedPairs` sums the recursion over
/// both orderings `(j,k)` and `(k,j)`, which doubles the mixed
/// coefficients. Under the second convention the second-order system does
/// not close under commutators; under the first, `L_{ijk}` are invariants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixedConvention {
    #[default]
    Symmetric,
    #[serde(rename = "ordered")]
    OrderedPairs,
}

impl MixedConvention {
    fn weight(self) -> i64 {
        match self {
            MixedConvention::Symmetric => 1,
            MixedConvention::OrderedPairs => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MixedConvention::Symmetric => "symmetric",
            MixedConvention::OrderedPairs => "ordered",
        }
    }
}

/// A first-order differential operator `Σ c_v ∂/∂v` on the jet space.
///
/// Coefficients are kept in canonical form and zero terms are dropped;
/// terms are ordered by the global variable order of their targets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffOperator {
    n: usize,
    terms: BTreeMap<Var, Expr>,
}

impl DiffOperator {
    pub fn zero(n: usize) -> Self {
        DiffOperator { n, terms: BTreeMap::new() }
    }

    /// Builds an operator, normalizing every coefficient and dropping zeros.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Var, Expr)>) -> Result<Self> {
        let mut op = DiffOperator::zero(n);
        for (v, c) in terms {
            op.add_term(v, &c)?;
        }
        Ok(op)
    }

    /// Adds `c ∂/∂v` to the operator.
    pub fn add_term(&mut self, v: Var, c: &Expr) -> Result<()> {
        let sum = match self.terms.get(&v) {
            Some(old) => (old + c).normalize()?,
            None => c.normalize()?,
        };
        if sum.is_canonical_zero() {
            self.terms.remove(&v);
        } else {
            self.terms.insert(v, sum);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Var, &Expr)> {
        self.terms.iter()
    }

    pub fn targets(&self) -> impl Iterator<Item = &Var> {
        self.terms.keys()
    }

    pub fn coefficient(&self, v: &Var) -> Option<&Expr> {
        self.terms.get(v)
    }

    /// Coefficient of `∂/∂A_{base,dirs}`, zero when absent.
    pub fn coeff_of(&self, base: usize, dirs: &[usize]) -> Expr {
        self.terms.get(&Var::jet(base, dirs)).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Applies the operator to a function of the jet coordinates.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut acc = Vec::with_capacity(self.terms.len());
        let vars = f.rat()?.vars();
        let touches = |v: &Var| {
            vars.contains(v) || vars.iter().any(|w| matches!(w, Var::Func(a) if a.arg.tree_vars().contains(v)))
        };
        for (v, c) in &self.terms {
            if !touches(v) {
                continue;
            }
            acc.push(c * &partial(f, v)?);
        }
        Expr::add(acc).normalize()
    }

    pub fn scale(&self, s: &Expr) -> Result<Self> {
        DiffOperator::from_terms(self.n, self.terms.iter().map(|(v, c)| (v.clone(), c * s)))
    }

    pub fn add(&self, other: &DiffOperator) -> Result<Self> {
        let mut out = self.clone();
        for (v, c) in &other.terms {
            out.add_term(v.clone(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOperator) -> Result<Self> {
        let mut out = self.clone();
        for (v, c) in &other.terms {
            out.add_term(v.clone(), &-c)?;
        }
        Ok(out)
    }

    /// Keeps only the terms whose target satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Var) -> bool) -> Self {
        DiffOperator {
            n: self.n,
            terms: self.terms.iter().filter(|(v, _)| keep(v)).map(|(v, c)| (v.clone(), c.clone())).collect(),
        }
    }

    /// Whether any coefficient mentions a formal `ξ` symbol.
    pub fn has_xi(&self) -> bool {
        self.terms.values().any(|c| c.tree_vars().iter().any(|v| matches!(v, Var::Xi(_))))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(v, c)| serde_json::json!({"target": v.to_string(), "coefficient": c.to_string()}))
            .collect();
        serde_json::Value::Array(terms)
    }

    pub fn latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (v, c)) in self.terms.iter().enumerate() {
            let (neg, body) = signed_coefficient(c);
            let body = body.latex();
            let body = if matches!(c.node(), Node::Add(_)) { format!("\\left({body}\\right)") } else { body };
            if k > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let partial = format!("\\partial_{{{}}}", v.latex());
            if body == "1" {
                s.push_str(&partial);
            } else {
                s.push_str(&format!("{body}\\,{partial}"));
            }
        }
        s
    }
}

/// Splits a leading minus sign off a coefficient for display.
fn signed_coefficient(c: &Expr) -> (bool, Expr) {
    match c.node() {
        Node::Num(q) if q < &num_rational::BigRational::from_integer(0.into()) => (true, Expr::num(-q)),
        Node::Mul(fs) => match fs[0].node() {
            Node::Num(q) if q < &num_rational::BigRational::from_integer(0.into()) => {
                let mut rest = vec![Expr::num(-q)];
                rest.extend(fs[1..].iter().cloned());
                (true, Expr::mul(rest).normalize().unwrap_or_else(|_| c.clone()))
            }
            _ => (false, c.clone()),
        },
        _ => (false, c.clone()),
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (v, c)) in self.terms.iter().enumerate() {
            let (neg, body) = signed_coefficient(c);
            if k > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            match body.node() {
                Node::Num(q) if q == &num_rational::BigRational::from_integer(1.into()) => {}
                Node::Add(_) => write!(f, "({body}) * ")?,
                _ => write!(f, "{body} * ")?,
            }
            write!(f, "d/d{v}")?;
        }
        Ok(())
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if n > crate::symbolic::MAX_DIMENSION {
        return Err(Error::IndexOutOfRange { index: n, n: crate::symbolic::MAX_DIMENSION });
    }
    Ok(())
}

fn xi(i: usize, j: usize) -> Expr {
    Expr::xi(i, j)
}

fn a(base: usize, dirs: &[usize]) -> Expr {
    Expr::a(base, dirs)
}

/// The generator `𝒱 = Σ ξ^i ∂/∂x^i + Σ A_i ξ^{i′} ∂/∂A_i`.
pub fn build_generator(n: usize) -> Result<DiffOperator> {
    check_dimension(n)?;
    let mut terms = Vec::new();
    for i in 1..=n {
        terms.push((Var::x(i), xi(i, 0)));
    }
    for i in 1..=n {
        terms.push((Var::coeff(i), &a(i, &[]) * &xi(i, 1)));
    }
    DiffOperator::from_terms(n, terms)
}

/// Sorted multi-indices of length `len` over `1..=n`.
pub fn multi_indices(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for d in start..=n {
            cur.push(d);
            rec(n, len, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, len, 1, &mut Vec::new(), &mut out);
    out
}

/// Every jet coordinate `A_{i,J}` with `|J| ≤ order`, in global order.
pub fn jet_coordinates(n: usize, order: usize) -> Vec<Var> {
    let mut out = Vec::new();
    for i in 1..=n {
        for len in 0..=order {
            for j in multi_indices(n, len) {
                out.push(Var::jet(i, &j));
            }
        }
    }
    out.sort();
    out
}

/// Prolongs the generator using the closed-form coefficients.
///
/// Orders 1 and 2 are supported. The coefficient of `∂/∂A_{j,jj}` is the
/// one produced by the total-derivative recursion,
/// `A_j ξ^{j‴} + A_{jj} ξ^{j″} − A_{jjj} ξ^{j′}`.
pub fn prolong(op: &DiffOperator, order: usize, convention: MixedConvention) -> Result<DiffOperator> {
    let n = op.n();
    check_dimension(n)?;
    if *op != build_generator(n)? {
        return Err(Error::NotGenerator);
    }
    if order == 0 {
        return Ok(op.clone());
    }
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    let w = Expr::int(convention.weight());
    let mut out = op.clone();
    for i in 1..=n {
        out.add_term(Var::jet(i, &[i]), &(&a(i, &[]) * &xi(i, 2)))?;
        for j in (1..=n).filter(|&j| j != i) {
            // A_{ij}: coefficient A_ij (ξ^{i′} − ξ^{j′})
            out.add_term(Var::jet(i, &[j]), &(&a(i, &[j]) * &(&xi(i, 1) - &xi(j, 1))))?;
        }
    }
    if order == 1 {
        return Ok(out);
    }
    for jb in 1..=n {
        for dirs in multi_indices(n, 2) {
            let (p, q) = (dirs[0], dirs[1]);
            let target = Var::jet(jb, &dirs);
            let c = if p == jb && q == jb {
                Expr::add([&a(jb, &[]) * &xi(jb, 3), &a(jb, &[jb]) * &xi(jb, 2), -(&a(jb, &[jb, jb]) * &xi(jb, 1))])
            } else if p == q {
                let i = p;
                Expr::add([&a(jb, &[i, i]) * &(&xi(jb, 1) - &(&Expr::int(2) * &xi(i, 1))), -(&a(jb, &[i]) * &xi(i, 2))])
            } else if p == jb || q == jb {
                let i = if p == jb { q } else { p };
                &w * &(&(&a(jb, &[i]) * &xi(jb, 2)) - &(&a(jb, &[jb, i]) * &xi(i, 1)))
            } else {
                let spread = Expr::add([xi(jb, 1), -xi(p, 1), -xi(q, 1)]);
                &w * &(&spread * &a(jb, &[p, q]))
            };
            out.add_term(target, &c)?;
        }
    }
    Ok(out)
}

/// Prolongation by the total-derivative recursion
/// `η_{i,J∪k} = D_k η_{i,J} − Σ_m D_k(ξ^m) A_{i,J∪m}`, seeded with
/// `η_i = A_i ξ^{i′}`. Since `ξ^m` depends on `x^m` alone the sum reduces
/// to `ξ^{k′} A_{i,J∪k}`.
///
/// Under `OrderedPairs` the coefficient of a mixed coordinate is the sum of
/// the recursion over every ordering of its multi-index.
pub fn generic_prolong_oracle(n: usize, order: usize, convention: MixedConvention) -> Result<DiffOperator> {
    check_dimension(n)?;
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    let mut out = build_generator(n)?;
    // η along an ordered path of directions.
    let mut memo: BTreeMap<(usize, Vec<usize>), Expr> = BTreeMap::new();
    fn eta(i: usize, path: &[usize], memo: &mut BTreeMap<(usize, Vec<usize>), Expr>) -> Result<Expr> {
        if let Some(e) = memo.get(&(i, path.to_vec())) {
            return Ok(e.clone());
        }
        let e = match path.split_last() {
            None => (&Expr::a(i, &[]) * &Expr::xi(i, 1)).normalize()?,
            Some((&k, prefix)) => {
                let prev = eta(i, prefix, memo)?;
                let coord = Expr::var(Var::Jet(JetVar::new(i, path)?));
                (&diff_total(&prev, k)? - &(&Expr::xi(k, 1) * &coord)).normalize()?
            }
        };
        memo.insert((i, path.to_vec()), e.clone());
        Ok(e)
    }
    for len in 1..=order {
        for i in 1..=n {
            for dirs in multi_indices(n, len) {
                let paths = match convention {
                    MixedConvention::Symmetric => vec![dirs.clone()],
                    MixedConvention::OrderedPairs => distinct_permutations(&dirs),
                };
                let mut acc = Vec::new();
                for p in &paths {
                    acc.push(eta(i, p, &mut memo)?);
                }
                out.add_term(Var::jet(i, &dirs), &Expr::add(acc))?;
            }
        }
    }
    Ok(out)
}

fn distinct_permutations(dirs: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            if !out.contains(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..rest.len() {
            let d = rest.remove(k);
            cur.push(d);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(k, d);
        }
    }
    rec(&mut dirs.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Operators multiplying each formal symbol `ξ^{i(j)}` in a prolonged
/// generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiDecomposition {
    n: usize,
    slots: BTreeMap<XiSym, DiffOperator>,
}

impl XiDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The operator `𝒱_{ξ^{i(j)}}`; empty when the symbol does not occur.
    pub fn get(&self, i: usize, j: usize) -> DiffOperator {
        self.slots.get(&XiSym::new(i, j)).cloned().unwrap_or_else(|| DiffOperator::zero(self.n))
    }

    pub fn slots(&self) -> impl Iterator<Item = (&XiSym, &DiffOperator)> {
        self.slots.iter()
    }

    /// Highest derivative order of `ξ` present.
    pub fn max_order(&self) -> usize {
        self.slots.keys().map(|s| s.order as usize).max().unwrap_or(0)
    }

    /// `Σ ξ^{i(j)} 𝒱_{ξ^{i(j)}}`.
    pub fn reassemble(&self) -> Result<DiffOperator> {
        let mut out = DiffOperator::zero(self.n);
        for (s, op) in &self.slots {
            let sym = Expr::xi(s.index as usize, s.order as usize);
            out = out.add(&op.scale(&sym)?)?;
        }
        Ok(out)
    }
}

/// Collects the operator multiplying each `ξ^{i(j)}`. Every coefficient of
/// `op` must be a linear form in the `ξ` symbols with `ξ`-free coefficients.
pub fn xi_decompose(op: &DiffOperator) -> Result<XiDecomposition> {
    let mut slots: BTreeMap<XiSym, DiffOperator> = BTreeMap::new();
    for (target, c) in op.terms() {
        let not_linear = || Error::NotLinearInXi { target: target.to_string() };
        let syms: Vec<XiSym> = c
            .rat()?
            .vars()
            .into_iter()
            .filter_map(|v| match v {
                Var::Xi(s) => Some(s),
                _ => None,
            })
            .collect();
        let mut rest = c.clone();
        for s in syms {
            let (coef, r) = split_linear(&rest, &Var::Xi(s))?.ok_or_else(not_linear)?;
            if coef.tree_vars().iter().any(|v| matches!(v, Var::Xi(_))) {
                return Err(not_linear());
            }
            slots.entry(s).or_insert_with(|| DiffOperator::zero(op.n())).add_term(target.clone(), &coef)?;
            rest = r;
        }
        if !rest.is_canonical_zero() {
            return Err(not_linear());
        }
    }
    slots.retain(|_, o| !o.is_empty());
    Ok(XiDecomposition { n: op.n(), slots })
}

/// Prolongation order of the determining system. Order 0 is the
/// generator itself.
fn prolonged_decomposition(n: usize, order: usize, convention: MixedConvention) -> Result<XiDecomposition> {
    xi_decompose(&prolong(&build_generator(n)?, order, convention)?)
}

/// A labelled operator of a determining system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemOperator {
    pub symbol: XiSym,
    pub op: DiffOperator,
}

/// The determining system whose common invariants are the differential
/// invariants of the given order.
///
/// * order 0: `∂/∂x^i` and `A_i ∂/∂A_i`;
/// * order 1: `𝒱_{ξ^{i′}}` acting on `A_i`, `A_{ij}` (`i ≠ j`); the `ξ`
///   and `ξ″` slots only involve `x^i` and `A_{ii}`, which they eliminate;
/// * order 2: `𝒱_{ξ^{i′}}` then `𝒱_{ξ^{i″}}`, restricted to the
///   coordinates of [`invariant_coordinates`]; the `ξ` and `ξ‴` slots
///   eliminate `x^i` and `A_{i,ii}`.
pub fn determining_system(n: usize, order: usize, convention: MixedConvention) -> Result<Vec<SystemOperator>> {
    check_dimension(n)?;
    let dec = prolonged_decomposition(n, order, convention)?;
    let coords = invariant_coordinates(n, order)?;
    let keep = |v: &Var| coords.binary_search(v).is_ok();
    let mut out = Vec::new();
    match order {
        0 => {
            for j in 0..=1 {
                for i in 1..=n {
                    out.push(SystemOperator { symbol: XiSym::new(i, j), op: dec.get(i, j) });
                }
            }
        }
        1 => {
            for i in 1..=n {
                out.push(SystemOperator { symbol: XiSym::new(i, 1), op: dec.get(i, 1).restrict(keep) });
            }
        }
        2 => {
            for j in 1..=2 {
                for i in 1..=n {
                    out.push(SystemOperator { symbol: XiSym::new(i, j), op: dec.get(i, j).restrict(keep) });
                }
            }
        }
        k => return Err(Error::UnsupportedOrder(k)),
    }
    Ok(out)
}

/// Coordinates the reduced determining system of `order` acts on.
///
/// Order 0: `x^i, A_i` (2n). Order 1: `A_i, A_{ij}` with `i ≠ j` (n²).
/// Order 2: every `A_{i,J}` with `|J| ≤ 2` except `A_{i,ii}` (n²(n+3)/2).
pub fn invariant_coordinates(n: usize, order: usize) -> Result<Vec<Var>> {
    check_dimension(n)?;
    let mut out: Vec<Var> = match order {
        0 => (1..=n).map(Var::x).chain((1..=n).map(Var::coeff)).collect(),
        1 => jet_coordinates(n, 1)
            .into_iter()
            .filter(|v| v.as_jet().is_some_and(|j| !(j.order() == 1 && j.is_pure_self())))
            .collect(),
        2 => jet_coordinates(n, 2)
            .into_iter()
            .filter(|v| v.as_jet().is_some_and(|j| !(j.order() == 2 && j.is_pure_self())))
            .collect(),
        k => return Err(Error::UnsupportedOrder(k)),
    };
    out.sort();
    Ok(out)
}
