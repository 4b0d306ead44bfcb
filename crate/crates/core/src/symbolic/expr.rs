//! Immutable expression trees and their canonical rational form.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Result;

use super::poly::{Monomial, Poly};
use super::ratfunc::RatFunc;
use super::var::{Func, FuncAtom, JetVar, Var};

/// Node kinds of an expression tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Node {
    Num(BigRational),
    /// Independent variable, jet coordinate or formal ξ symbol.
    Var(Var),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, i32),
    Div(Expr, Expr),
    Func(Func, Expr),
}

struct Inner {
    node: Node,
    rat: OnceLock<Result<RatFunc>>,
}

/// A shared, immutable expression.
///
/// Each node memoizes its canonical rational form the first time it is
/// requested; the cache is a [`OnceLock`], so expressions stay `Send + Sync`.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(Inner { node, rat: OnceLock::new() }))
    }

    fn with_rat(node: Node, rat: RatFunc) -> Expr {
        let cell = OnceLock::new();
        let _ = cell.set(Ok(rat));
        Expr(Arc::new(Inner { node, rat: cell }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn num(q: BigRational) -> Expr {
        Expr::from_node(Node::Num(q))
    }

    pub fn int(c: i64) -> Expr {
        Expr::num(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// A variable leaf. Function atoms become `Func` nodes.
    pub fn var(v: Var) -> Expr {
        match v {
            Var::Func(a) => Expr::func(a.func, a.arg.clone()),
            v => Expr::from_node(Node::Var(v)),
        }
    }

    pub fn x(i: usize) -> Expr {
        Expr::var(Var::x(i))
    }

    /// Jet coordinate `A_{base, dirs}`.
    pub fn a(base: usize, dirs: &[usize]) -> Expr {
        Expr::var(Var::jet(base, dirs))
    }

    pub fn jet(j: JetVar) -> Expr {
        Expr::var(Var::Jet(j))
    }

    pub fn xi(index: usize, order: usize) -> Expr {
        Expr::var(Var::xi(index, order))
    }

    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut out = Vec::new();
        for t in terms {
            match t.node() {
                Node::Add(inner) => out.extend(inner.iter().cloned()),
                _ => out.push(t),
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Add(out)),
        }
    }

    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut out = Vec::new();
        for t in factors {
            match t.node() {
                Node::Mul(inner) => out.extend(inner.iter().cloned()),
                _ => out.push(t),
            }
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(out)),
        }
    }

    pub fn pow(base: Expr, e: i32) -> Expr {
        Expr::from_node(Node::Pow(base, e))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(num: Expr, den: Expr) -> Expr {
        Expr::from_node(Node::Div(num, den))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::from_node(Node::Func(f, arg))
    }

    /// Syntactic negation, folding the sign into a leading numeric factor.
    pub fn negate(e: &Expr) -> Expr {
        match e.node() {
            Node::Num(q) => Expr::num(-q),
            Node::Mul(fs) => match fs[0].node() {
                Node::Num(q) => {
                    let mut out = vec![Expr::num(-q)];
                    out.extend(fs[1..].iter().cloned());
                    Expr::from_node(Node::Mul(out))
                }
                _ => {
                    let mut out = vec![Expr::int(-1)];
                    out.extend(fs.iter().cloned());
                    Expr::from_node(Node::Mul(out))
                }
            },
            Node::Div(a, b) => {
                let na = Expr::negate(a);
                // A zero numerator would swallow the sign.
                if na == *a {
                    Expr::from_node(Node::Mul(vec![Expr::int(-1), e.clone()]))
                } else {
                    Expr::div(na, b.clone())
                }
            }
            _ => Expr::from_node(Node::Mul(vec![Expr::int(-1), e.clone()])),
        }
    }

    /// Canonical rational form of this expression (memoized).
    pub fn rat(&self) -> Result<&RatFunc> {
        self.0.rat.get_or_init(|| self.compute_rat()).as_ref().map_err(Clone::clone)
    }

    fn compute_rat(&self) -> Result<RatFunc> {
        Ok(match self.node() {
            Node::Num(q) => RatFunc::rational(q),
            Node::Var(v) => RatFunc::var(v.clone()),
            Node::Add(ts) => {
                let mut acc = RatFunc::zero();
                for t in ts {
                    acc = acc.add(t.rat()?);
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = RatFunc::one();
                for f in fs {
                    acc = acc.mul(f.rat()?);
                }
                acc
            }
            Node::Pow(b, e) => b.rat()?.pow(*e)?,
            Node::Div(a, b) => a.rat()?.div(b.rat()?)?,
            Node::Func(f, arg) => func_rat(*f, arg)?,
        })
    }

    /// Builds the canonical tree of a rational function.
    pub fn from_rat(r: RatFunc) -> Expr {
        let node = if r.den().is_one() {
            poly_node(r.num())
        } else {
            Node::Div(Expr::from_node(poly_node(r.num())), Expr::from_node(poly_node(r.den())))
        };
        Expr::with_rat(node, r)
    }

    /// Canonical form: equal expressions normalize to identical trees.
    pub fn normalize(&self) -> Result<Expr> {
        Ok(Expr::from_rat(self.rat()?.clone()))
    }

    pub fn is_canonical_zero(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Num(q) => Some(q),
            _ => None,
        }
    }

    /// Variables appearing in the tree; function atoms are descended into.
    pub fn tree_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Var(v) => {
                out.insert(v.clone());
            }
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Node::Pow(b, _) => b.collect_vars(out),
            Node::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Node::Func(_, a) => a.collect_vars(out),
        }
    }

    pub fn has_funcs(&self) -> bool {
        match self.node() {
            Node::Num(_) | Node::Var(_) => false,
            Node::Func(..) => true,
            Node::Add(xs) | Node::Mul(xs) => xs.iter().any(Expr::has_funcs),
            Node::Pow(b, _) => b.has_funcs(),
            Node::Div(a, b) => a.has_funcs() || b.has_funcs(),
        }
    }

    /// Largest variable index (x^i, base or direction of a jet, ξ index).
    pub fn max_index(&self) -> usize {
        self.tree_vars()
            .iter()
            .map(|v| match v {
                Var::X(i) => *i as usize,
                Var::Jet(j) => j.max_index(),
                Var::Xi(s) => s.index as usize,
                Var::Func(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// LaTeX rendering in the usual `A_{ij}` notation.
    pub fn latex(&self) -> String {
        let mut s = String::new();
        latex_into(self, &mut s, 0);
        s
    }
}

pub(crate) fn func_rat(f: Func, arg: &Expr) -> Result<RatFunc> {
    let a = arg.rat()?;
    if let Some(c) = a.as_constant() {
        match f {
            Func::Exp | Func::Cos if c.is_zero() => return Ok(RatFunc::one()),
            Func::Sin if c.is_zero() => return Ok(RatFunc::zero()),
            Func::Log if c.is_one() => return Ok(RatFunc::zero()),
            Func::Sqrt => {
                if let Some(r) = exact_sqrt(&c) {
                    return Ok(RatFunc::rational(&r));
                }
            }
            _ => {}
        }
    }
    Ok(RatFunc::var(Var::Func(Arc::new(FuncAtom { func: f, arg: Expr::from_rat(a.clone()) }))))
}

fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn poly_node(p: &Poly) -> Node {
    if p.is_zero() {
        return Node::Num(BigRational::zero());
    }
    let mut terms: Vec<Expr> = p.terms().rev().map(|(m, c)| term_expr(m, c)).collect();
    if terms.len() == 1 {
        let t = terms.pop().unwrap();
        return t.node().clone();
    }
    Node::Add(terms)
}

fn term_expr(m: &Monomial, c: &BigInt) -> Expr {
    let q = BigRational::from_integer(c.clone());
    if m.is_one() {
        return Expr::num(q);
    }
    let mut fs = Vec::new();
    if !c.is_one() {
        fs.push(Expr::num(q));
    }
    for (v, e) in m.factors() {
        let base = Expr::var(v.clone());
        fs.push(if *e == 1 { base } else { Expr::pow(base, *e as i32) });
    }
    Expr::mul(fs)
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.node.hash(state)
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

// ---------------------------------------------------------------------------
// Printing. The text form is accepted back by the parser and reproduces the
// same tree.
// ---------------------------------------------------------------------------

fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one()
}

fn negative_leading(e: &Expr) -> bool {
    match e.node() {
        Node::Num(q) => q.is_negative(),
        Node::Mul(fs) => matches!(fs[0].node(), Node::Num(q) if q.is_negative()),
        Node::Div(a, _) => negative_leading(a),
        _ => false,
    }
}

/// A leading `-1` factor may print as a bare minus only if reparsing
/// `-first * ...` rebuilds the same node.
fn minus_droppable(e: &Expr) -> bool {
    let Node::Mul(fs) = e.node() else { return false };
    match &fs[..] {
        [m, first, tail @ ..] if matches!(m.node(), Node::Num(q) if q == &-BigRational::one()) => {
            Expr::mul(std::iter::once(Expr::negate(first)).chain(tail.iter().cloned())) == *e
        }
        _ => false,
    }
}

/// Inverse of [`Expr::negate`] for terms where `negative_leading` holds.
fn strip_sign(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(q) => Expr::num(-q),
        Node::Mul(fs) => {
            let Node::Num(q) = fs[0].node() else { unreachable!() };
            let rest = &fs[1..];
            if minus_droppable(e) {
                if rest.len() == 1 {
                    rest[0].clone()
                } else {
                    Expr::from_node(Node::Mul(rest.to_vec()))
                }
            } else {
                let mut out = vec![Expr::num(-q)];
                out.extend(rest.iter().cloned());
                Expr::from_node(Node::Mul(out))
            }
        }
        Node::Div(a, b) => Expr::div(strip_sign(a), b.clone()),
        _ => unreachable!(),
    }
}

fn write_num(q: &BigRational, f: &mut fmt::Formatter<'_>, bare: bool) -> fmt::Result {
    if bare || (is_integer(q) && !q.is_negative()) {
        if is_integer(q) {
            write!(f, "{}", q.numer())
        } else {
            write!(f, "{}/{}", q.numer(), q.denom())
        }
    } else if is_integer(q) {
        write!(f, "({})", q.numer())
    } else {
        write!(f, "({}/{})", q.numer(), q.denom())
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Num(q) => write_num(q, f, true),
        Node::Var(v) => write!(f, "{v}"),
        Node::Func(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, f)?;
            f.write_str(")")
        }
        Node::Add(ts) => {
            for (k, t) in ts.iter().enumerate() {
                if k > 0 && negative_leading(t) {
                    f.write_str(" - ")?;
                    write_term(&strip_sign(t), f)?;
                } else {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    write_term(t, f)?;
                }
            }
            Ok(())
        }
        Node::Mul(fs) => {
            let mut rest = &fs[..];
            if let Node::Num(q) = fs[0].node() {
                if minus_droppable(e) {
                    f.write_str("-")?;
                    rest = &fs[1..];
                    write_factor(&rest[0], f)?;
                    rest = &rest[1..];
                } else {
                    write_num(q, f, is_integer(q))?;
                    rest = &fs[1..];
                }
                for x in rest {
                    f.write_str(" * ")?;
                    write_factor(x, f)?;
                }
                return Ok(());
            }
            for (k, x) in rest.iter().enumerate() {
                if k > 0 {
                    f.write_str(" * ")?;
                }
                write_factor(x, f)?;
            }
            Ok(())
        }
        Node::Div(a, b) => {
            match a.node() {
                Node::Add(_) => {
                    f.write_str("(")?;
                    write_expr(a, f)?;
                    f.write_str(")")?;
                }
                _ => write_expr(a, f)?,
            }
            f.write_str(" / ")?;
            match b.node() {
                Node::Var(_) | Node::Func(..) | Node::Pow(..) => write_expr(b, f),
                Node::Num(q) if is_integer(q) && !q.is_negative() => write_expr(b, f),
                _ => {
                    f.write_str("(")?;
                    write_expr(b, f)?;
                    f.write_str(")")
                }
            }
        }
        Node::Pow(b, k) => {
            match b.node() {
                Node::Var(_) | Node::Func(..) => write_expr(b, f)?,
                Node::Num(q) if is_integer(q) && !q.is_negative() => write_expr(b, f)?,
                _ => {
                    f.write_str("(")?;
                    write_expr(b, f)?;
                    f.write_str(")")?;
                }
            }
            if *k < 0 {
                write!(f, "^({k})")
            } else {
                write!(f, "^{k}")
            }
        }
    }
}

/// A summand: nested sums need parentheses.
fn write_term(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if matches!(e.node(), Node::Add(_)) {
        f.write_str("(")?;
        write_expr(e, f)?;
        f.write_str(")")
    } else {
        write_expr(e, f)
    }
}

/// A non-leading factor of a product.
fn write_factor(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Num(q) => write_num(q, f, false),
        Node::Add(_) | Node::Div(..) | Node::Mul(_) => {
            f.write_str("(")?;
            write_expr(e, f)?;
            f.write_str(")")
        }
        _ => write_expr(e, f),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

fn latex_num(q: &BigRational) -> String {
    if is_integer(q) {
        q.numer().to_string()
    } else if q.is_negative() {
        format!("-\\frac{{{}}}{{{}}}", -q.numer(), q.denom())
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

/// `prec`: 0 top/sum, 1 product factor, 2 power base.
fn latex_into(e: &Expr, s: &mut String, prec: u8) {
    match e.node() {
        Node::Num(q) => {
            let t = latex_num(q);
            if prec > 0 && (q.is_negative() || (prec > 1 && !is_integer(q))) {
                s.push_str(&format!("\\left({t}\\right)"));
            } else {
                s.push_str(&t);
            }
        }
        Node::Var(v) => s.push_str(&v.latex()),
        Node::Func(func, a) => {
            s.push_str(&format!("\\{}\\left(", func.name()));
            latex_into(a, s, 0);
            s.push_str("\\right)");
        }
        Node::Add(ts) => {
            if prec > 0 {
                s.push_str("\\left(");
            }
            for (k, t) in ts.iter().enumerate() {
                if k > 0 && negative_leading(t) {
                    s.push_str(" - ");
                    latex_into(&strip_sign(t), s, 0);
                } else {
                    if k > 0 {
                        s.push_str(" + ");
                    }
                    latex_into(t, s, 0);
                }
            }
            if prec > 0 {
                s.push_str("\\right)");
            }
        }
        Node::Mul(fs) => {
            let wrap = prec > 1;
            if wrap {
                s.push_str("\\left(");
            }
            let mut rest = &fs[..];
            if let Node::Num(q) = fs[0].node() {
                if q.abs().is_one() && fs.len() > 1 {
                    if q.is_negative() {
                        s.push('-');
                    }
                } else {
                    s.push_str(&latex_num(q));
                    s.push(' ');
                }
                rest = &fs[1..];
            }
            for (k, x) in rest.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                latex_into(x, s, 1);
            }
            if wrap {
                s.push_str("\\right)");
            }
        }
        Node::Div(a, b) => {
            let neg = negative_leading(a);
            if neg {
                s.push('-');
            }
            s.push_str("\\frac{");
            latex_into(&if neg { strip_sign(a) } else { a.clone() }, s, 0);
            s.push_str("}{");
            latex_into(b, s, 0);
            s.push('}');
        }
        Node::Pow(b, k) => {
            latex_into(b, s, 2);
            s.push_str(&format!("^{{{k}}}"));
        }
    }
}

impl ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add([self.clone(), rhs.clone()])
    }
}

impl ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::add([self.clone(), Expr::negate(rhs)])
    }
}

impl ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul([self.clone(), rhs.clone()])
    }
}

impl ops::Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::div(self.clone(), rhs.clone())
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::negate(self)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::negate(&self)
    }
}

impl From<i64> for Expr {
    fn from(c: i64) -> Expr {
        Expr::int(c)
    }
}

/// Converts a rational constant to `f64`.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn normalization_examples() {
        let a1 = Expr::a(1, &[]);
        let a2 = Expr::a(2, &[]);
        let q = &(&a1 * &a2) / &(&a2 * &a1);
        assert_eq!(q.normalize().unwrap(), Expr::one());

        let r = &a1 / &Expr::pow(a1.clone(), 2);
        assert_eq!(r.normalize().unwrap().to_string(), "1 / A1");

        let x1 = Expr::x(1);
        assert!((&x1 - &x1).normalize().unwrap().is_canonical_zero());
    }

    #[test]
    fn normalize_is_idempotent() {
        let e = &(&Expr::a(1, &[2]) * &Expr::a(2, &[])) / &(&Expr::a(1, &[]) - &Expr::int(3));
        let n = e.normalize().unwrap();
        assert_eq!(n.normalize().unwrap(), n);
    }

    #[test]
    fn division_by_zero_detected() {
        let x1 = Expr::x(1);
        let e = &Expr::one() / &(&x1 - &x1);
        assert_eq!(e.normalize(), Err(Error::DivisionByZero));
        assert_eq!(Expr::pow(Expr::zero(), -1).normalize(), Err(Error::ZeroToNegativePower));
    }

    #[test]
    fn constant_function_folds() {
        assert_eq!(Expr::func(Func::Exp, Expr::zero()).normalize().unwrap(), Expr::one());
        assert_eq!(Expr::func(Func::Sqrt, Expr::int(9)).normalize().unwrap(), Expr::int(3));
        let e = Expr::func(Func::Sqrt, Expr::int(2)).normalize().unwrap();
        assert!(matches!(e.node(), Node::Func(Func::Sqrt, _)));
    }

    #[test]
    fn printing_signs() {
        let e = &Expr::a(1, &[2]) - &Expr::a(2, &[1]);
        assert_eq!(e.normalize().unwrap().to_string(), "A1_2 - A2_1");
        let t = &(&Expr::a(1, &[2]) * &Expr::a(2, &[])) / &Expr::a(1, &[]);
        assert_eq!(t.normalize().unwrap().to_string(), "A1_2 * A2 / A1");
        assert_eq!(t.normalize().unwrap().latex(), "\\frac{A_{12} A_{2}}{A_{1}}");
    }
}
