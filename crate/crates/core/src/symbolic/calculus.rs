//! Differentiation and substitution on canonical forms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

use super::expr::{func_rat, Expr};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::var::{Func, FuncAtom, Var};

/// Chain rule over a canonical form: `Σ_v ∂r/∂v · d(v)`, where `d` gives the
/// derivative of each polynomial variable and function atoms are expanded
/// through their argument.
fn derive(r: &RatFunc, d: &mut impl FnMut(&Var) -> Result<RatFunc>) -> Result<RatFunc> {
    let mut acc = RatFunc::zero();
    for v in r.vars() {
        let dv = match &v {
            Var::Func(atom) => {
                let inner = derive(atom.arg.rat()?, d)?;
                if inner.is_zero() {
                    continue;
                }
                func_prime(atom)?.mul(&inner)
            }
            _ => d(&v)?,
        };
        if dv.is_zero() {
            continue;
        }
        acc = acc.add(&r.formal_derivative(&v).mul(&dv));
    }
    Ok(acc)
}

/// `f'(g)` for the atom `f(g)`.
fn func_prime(atom: &FuncAtom) -> Result<RatFunc> {
    let g = &atom.arg;
    Ok(match atom.func {
        Func::Exp => RatFunc::var(Var::Func(std::sync::Arc::new(atom.clone()))),
        Func::Log => g.rat()?.inv()?,
        Func::Sin => func_rat(Func::Cos, g)?,
        Func::Cos => func_rat(Func::Sin, g)?.neg(),
        Func::Sqrt => RatFunc::int(2).mul(&func_rat(Func::Sqrt, g)?).inv()?,
    })
}

/// Partial derivative with respect to a single variable, every other
/// variable held fixed.
pub fn partial(e: &Expr, v: &Var) -> Result<Expr> {
    let r = derive(e.rat()?, &mut |w| Ok(if w == v { RatFunc::one() } else { RatFunc::zero() }))?;
    Ok(Expr::from_rat(r))
}

/// Total derivative `D_k` on the jet: `D_k x^i = δ_ik`,
/// `D_k A_{i,J} = A_{i,J∪k}`, `D_k ξ^{i(j)} = δ_ik ξ^{i(j+1)}`.
pub fn diff_total(e: &Expr, k: usize) -> Result<Expr> {
    Ok(Expr::from_rat(diff_total_rat(e.rat()?, k)?))
}

pub(crate) fn diff_total_rat(r: &RatFunc, k: usize) -> Result<RatFunc> {
    derive(r, &mut |v| total_of_var(v, k))
}

fn total_of_var(v: &Var, k: usize) -> Result<RatFunc> {
    Ok(match v {
        Var::X(i) if *i as usize == k => RatFunc::one(),
        Var::X(_) => RatFunc::zero(),
        Var::Jet(j) => RatFunc::var(Var::Jet(j.extend(k)?)),
        Var::Xi(s) if s.index as usize == k => RatFunc::var(Var::xi(k, s.order as usize + 1)),
        Var::Xi(_) => RatFunc::zero(),
        Var::Func(_) => unreachable!("atoms are expanded by the chain rule"),
    })
}

/// Total derivative along a concrete coefficient tuple: jet coordinates do
/// not occur, only `x` and function atoms. Same as [`partial`] in `x^k`.
pub fn diff_x(e: &Expr, k: usize) -> Result<Expr> {
    partial(e, &Var::x(k))
}

/// Simultaneous substitution `v ↦ map[v]`; unmapped variables stay.
pub fn substitute(e: &Expr, map: &BTreeMap<Var, Expr>) -> Result<Expr> {
    Ok(Expr::from_rat(substitute_rat(e.rat()?, map)?))
}

fn substitute_rat(r: &RatFunc, map: &BTreeMap<Var, Expr>) -> Result<RatFunc> {
    let mut cache: BTreeMap<Var, RatFunc> = BTreeMap::new();
    let num = substitute_poly(r.num(), map, &mut cache)?;
    let den = substitute_poly(r.den(), map, &mut cache)?;
    num.div(&den)
}

fn substitute_poly(p: &Poly, map: &BTreeMap<Var, Expr>, cache: &mut BTreeMap<Var, RatFunc>) -> Result<RatFunc> {
    let mut acc = RatFunc::zero();
    for (m, c) in p.terms() {
        let mut t = RatFunc::rational(&BigRational::from_integer(BigInt::clone(c)));
        for (v, e) in m.factors() {
            let x = match cache.get(v) {
                Some(x) => x.clone(),
                None => {
                    let x = substitute_var(v, map)?;
                    cache.insert(v.clone(), x.clone());
                    x
                }
            };
            t = t.mul(&x.pow(*e as i32)?);
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

fn substitute_var(v: &Var, map: &BTreeMap<Var, Expr>) -> Result<RatFunc> {
    if let Some(e) = map.get(v) {
        return e.rat().cloned();
    }
    match v {
        Var::Func(atom) => {
            let arg = substitute_rat(atom.arg.rat()?, map)?;
            func_rat(atom.func, &Expr::from_rat(arg))
        }
        v => Ok(RatFunc::var(v.clone())),
    }
}

/// Coefficient of `s` in `e`, provided `e` is affine in `s`; `None` when the
/// dependence is not affine. Returns `(coefficient, remainder)`.
pub fn split_linear(e: &Expr, s: &Var) -> Result<Option<(Expr, Expr)>> {
    let r = e.rat()?;
    if r.den().contains_var(s) || r.num().degree_in(s) > 1 {
        return Ok(None);
    }
    let u = r.num().to_univariate(s);
    let den = RatFunc::from_poly(r.den().clone());
    let part = |p: &Poly| RatFunc::from_poly(p.clone()).div(&den);
    let c0 = part(&u[0])?;
    let c1 = if u.len() > 1 { part(&u[1])? } else { RatFunc::zero() };
    Ok(Some((Expr::from_rat(c1), Expr::from_rat(c0))))
}

impl Expr {
    pub fn diff_total(&self, k: usize) -> Result<Expr> {
        diff_total(self, k)
    }

    pub fn partial(&self, v: &Var) -> Result<Expr> {
        partial(self, v)
    }

    pub fn substitute(&self, map: &BTreeMap<Var, Expr>) -> Result<Expr> {
        substitute(self, map)
    }
}

/// Rejects expressions that mention `ξ` symbols where only jet variables
/// are allowed.
pub fn ensure_no_xi(e: &Expr) -> Result<()> {
    if e.tree_vars().iter().any(|v| matches!(v, Var::Xi(_))) {
        Err(Error::FormalSymbols)
    } else {
        Ok(())
    }
}
