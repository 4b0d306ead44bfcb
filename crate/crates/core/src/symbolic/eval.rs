//! Floating-point evaluation and zero testing.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::expr::{rational_to_f64, Expr, Node};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::var::Var;

/// Denominators smaller than this in magnitude are treated as zero.
pub const DENOMINATOR_THRESHOLD: f64 = 1e-300;

/// Default number of random points used by the probabilistic zero test.
pub const DEFAULT_ZERO_TEST_POINTS: usize = 8;

const ZERO_TEST_SEED: u64 = 0x005e_ed0f_2e60;
const ZERO_TEST_RTOL: f64 = 1e-9;

/// Assignment of values to variables.
pub type Point = BTreeMap<Var, f64>;

/// Evaluates the expression tree in double precision.
pub fn eval_numeric(e: &Expr, point: &Point) -> Result<f64> {
    eval_with(e, &mut |v| point.get(v).copied())
}

/// Like [`eval_numeric`] with a caller-supplied valuation.
pub fn eval_with(e: &Expr, value: &mut impl FnMut(&Var) -> Option<f64>) -> Result<f64> {
    Ok(match e.node() {
        Node::Num(q) => rational_to_f64(q),
        Node::Var(v) => value(v).ok_or_else(|| Error::Unassigned(v.to_string()))?,
        Node::Add(ts) => {
            let mut s = 0.0;
            for t in ts {
                s += eval_with(t, value)?;
            }
            s
        }
        Node::Mul(fs) => {
            let mut s = 1.0;
            for f in fs {
                s *= eval_with(f, value)?;
            }
            s
        }
        Node::Pow(b, k) => {
            let x = eval_with(b, value)?;
            if *k < 0 && x.abs() < DENOMINATOR_THRESHOLD {
                return Err(Error::NumericDivisionByZero(x));
            }
            x.powi(*k)
        }
        Node::Div(a, b) => {
            let d = eval_with(b, value)?;
            if d.abs() < DENOMINATOR_THRESHOLD {
                return Err(Error::NumericDivisionByZero(d));
            }
            eval_with(a, value)? / d
        }
        Node::Func(f, a) => f.apply_f64(eval_with(a, value)?)?,
    })
}

/// Outcome of a zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroVerdict {
    pub zero: bool,
    /// Set when the verdict rests on random evaluation rather than exact
    /// normalization (the expression contains elementary functions).
    pub probabilistic: bool,
}

/// `true` when `e` is identically zero. See [`is_zero_with`].
pub fn is_zero(e: &Expr) -> ZeroVerdict {
    is_zero_with(e, DEFAULT_ZERO_TEST_POINTS, ZERO_TEST_SEED)
}

/// Exact for rational expressions; with function atoms, the numerator of the
/// canonical form is evaluated at `k` seeded random points and compared with
/// the magnitude of its terms. An expression that fails to normalize (a
/// vanishing denominator) is reported nonzero.
pub fn is_zero_with(e: &Expr, k: usize, seed: u64) -> ZeroVerdict {
    let Ok(r) = e.rat() else {
        return ZeroVerdict { zero: false, probabilistic: false };
    };
    if r.is_zero() {
        return ZeroVerdict { zero: true, probabilistic: false };
    }
    if !r.has_atoms() {
        return ZeroVerdict { zero: false, probabilistic: false };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluated = 0;
    let mut attempts = 0;
    while evaluated < k.max(1) && attempts < 20 * k.max(1) {
        attempts += 1;
        let mut point = Point::new();
        let Ok(terms) = poly_term_values(r.num(), &mut point, &mut rng) else {
            continue;
        };
        let sum: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        if !sum.is_finite() || !scale.is_finite() {
            continue;
        }
        evaluated += 1;
        if sum.abs() > ZERO_TEST_RTOL * scale.max(f64::MIN_POSITIVE) {
            return ZeroVerdict { zero: false, probabilistic: true };
        }
    }
    ZeroVerdict { zero: evaluated > 0, probabilistic: true }
}

fn poly_term_values(p: &Poly, point: &mut Point, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut t = rational_to_f64(&num_rational::BigRational::from_integer(c.clone()));
        for (v, e) in m.factors() {
            t *= var_value(v, point, rng)?.powi(*e as i32);
        }
        out.push(t);
    }
    Ok(out)
}

fn var_value(v: &Var, point: &mut Point, rng: &mut ChaCha8Rng) -> Result<f64> {
    if let Some(x) = point.get(v) {
        return Ok(*x);
    }
    let x = match v {
        Var::Func(atom) => {
            let a = rat_value(atom.arg.rat()?, point, rng)?;
            atom.func.apply_f64(a)?
        }
        _ => rng.random_range(0.5..2.0),
    };
    point.insert(v.clone(), x);
    Ok(x)
}

fn rat_value(r: &RatFunc, point: &mut Point, rng: &mut ChaCha8Rng) -> Result<f64> {
    let n: f64 = poly_term_values(r.num(), point, rng)?.iter().sum();
    let d: f64 = poly_term_values(r.den(), point, rng)?.iter().sum();
    if d.abs() < DENOMINATOR_THRESHOLD {
        return Err(Error::NumericDivisionByZero(d));
    }
    Ok(n / d)
}

impl Expr {
    pub fn eval(&self, point: &Point) -> Result<f64> {
        eval_numeric(self, point)
    }

    pub fn is_zero(&self) -> bool {
        is_zero(self).zero
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s, 3).unwrap()
    }

    fn pt(vals: &[(&str, f64)]) -> Point {
        vals.iter()
            .map(|(name, x)| {
                let Node::Var(v) = p(name).node().clone() else { panic!() };
                (v, *x)
            })
            .collect()
    }

    #[test]
    fn invariant_values() {
        let t = p("A1_2 * A2 / A1");
        assert_eq!(eval_numeric(&t, &pt(&[("A1", 2.0), ("A2", 3.0), ("A1_2", 4.0)])).unwrap(), 6.0);
        let k = p("A1_22 * A2 / A1_2 + A2_2");
        let v = eval_numeric(&k, &pt(&[("A1_22", 1.0), ("A2", 2.0), ("A1_2", 4.0), ("A2_2", 5.0)]));
        assert_eq!(v.unwrap(), 5.5);
        let l = p("A1_23 * A2 * A3 / A1");
        let v = eval_numeric(&l, &pt(&[("A1_23", 2.0), ("A2", 3.0), ("A3", 5.0), ("A1", 6.0)]));
        assert_eq!(v.unwrap(), 5.0);
    }

    #[test]
    fn evaluation_errors() {
        let e = p("1 / x1");
        assert_eq!(eval_numeric(&e, &Point::new()), Err(Error::Unassigned("x1".into())));
        assert!(matches!(eval_numeric(&e, &pt(&[("x1", 0.0)])), Err(Error::NumericDivisionByZero(_))));
        assert!(matches!(eval_numeric(&p("log(x1)"), &pt(&[("x1", -1.0)])), Err(Error::NumericDomain(_))));
    }

    #[test]
    fn exact_zero_tests() {
        assert_eq!(is_zero(&p("A1_2 - A1_2")), ZeroVerdict { zero: true, probabilistic: false });
        assert_eq!(is_zero(&p("A1_2 * A2 / A1")), ZeroVerdict { zero: false, probabilistic: false });
    }

    #[test]
    fn transcendental_zero_tests() {
        let e = p("sin(x1)^2 + cos(x1)^2 - 1");
        assert_eq!(is_zero(&e), ZeroVerdict { zero: true, probabilistic: true });
        let e = p("exp(x1) * exp(x2) - exp(x1 + x2)");
        assert_eq!(is_zero(&e), ZeroVerdict { zero: true, probabilistic: true });
        let e = p("exp(x1) - 1 - x1");
        assert_eq!(is_zero(&e), ZeroVerdict { zero: false, probabilistic: true });
        // Atoms that cancel structurally are decided exactly.
        assert!(!is_zero(&p("exp(x1) - exp(x1)")).probabilistic);
    }
}
