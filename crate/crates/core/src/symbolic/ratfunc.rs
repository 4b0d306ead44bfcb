//! Canonical rational functions `num / den` over ℚ.
//!
//! Invariant: `num` and `den` have integer coefficients, are coprime as
//! polynomials (their integer contents included), and `den` has a positive
//! leading coefficient. Zero is `0 / 1`. Two rational functions are equal
//! exactly when their representations are identical.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::gcd::gcd;
use super::poly::Poly;
use super::var::Var;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn var(v: Var) -> Self {
        RatFunc::from_poly(Poly::var(v))
    }

    pub fn int(c: i64) -> Self {
        RatFunc::from_poly(Poly::constant(BigInt::from(c)))
    }

    pub fn rational(q: &BigRational) -> Self {
        RatFunc { num: Poly::constant(q.numer().clone()), den: Poly::constant(q.denom().clone()) }.canonical_sign()
    }

    /// Builds `num / den`, reducing to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        if den.is_one() {
            return Ok(RatFunc { num, den });
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        Ok(RatFunc { num, den }.canonical_sign())
    }

    fn canonical_sign(self) -> Self {
        if self.den.leading_coeff_sign().is_lt() {
            RatFunc { num: -&self.num, den: -&self.den }
        } else {
            self
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(BigRational::new(n.clone(), d.clone())),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn has_atoms(&self) -> bool {
        self.vars().iter().any(Var::is_atom)
    }

    pub fn add(&self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero den");
        }
        let g = gcd(&self.den, &rhs.den);
        let bd = self.den.exact_div(&g).expect("gcd divides");
        let dd = rhs.den.exact_div(&g).expect("gcd divides");
        let num = &(&self.num * &dd) + &(&rhs.num * &bd);
        let den = &self.den * &dd;
        RatFunc::new(num, den).expect("nonzero den")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, rhs: &RatFunc) -> RatFunc {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.exact_div(&g1).expect("gcd divides");
        let d2 = rhs.den.exact_div(&g1).expect("gcd divides");
        let n2 = rhs.num.exact_div(&g2).expect("gcd divides");
        let d1 = self.den.exact_div(&g2).expect("gcd divides");
        RatFunc { num: &n1 * &n2, den: &d1 * &d2 }.canonical_sign()
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc { num: self.den.clone(), den: self.num.clone() }.canonical_sign())
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatFunc> {
        let base = if e < 0 {
            if self.is_zero() {
                return Err(Error::ZeroToNegativePower);
            }
            self.inv()?
        } else {
            self.clone()
        };
        let k = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn scale(&self, q: &BigRational) -> RatFunc {
        self.mul(&RatFunc::rational(q))
    }

    /// Formal partial derivative treating every variable, atoms included, as
    /// independent.
    pub fn formal_derivative(&self, v: &Var) -> RatFunc {
        let dn = self.num.derivative(v);
        if self.den.is_one() {
            return RatFunc::from_poly(dn);
        }
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return RatFunc::new(dn, self.den.clone()).expect("nonzero den");
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RatFunc::new(num, self.den.pow(2)).expect("nonzero den")
    }

    /// Exact evaluation over ℚ; every variable must map to a rational value.
    pub fn eval_rational(&self, value: &mut impl FnMut(&Var) -> Result<BigRational>) -> Result<BigRational> {
        let to_q = |c: &BigInt| BigRational::from_integer(c.clone());
        let n = self.num.eval_with(value, to_q)?;
        let d = self.den.eval_with(value, to_q)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(n / d)
    }

    /// Total number of terms; used to rank pivot candidates.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn is_negative_leading(&self) -> bool {
        self.num.leading().is_some_and(|(_, c)| c.is_negative())
    }

    pub fn is_unit_constant(&self) -> bool {
        self.as_constant().is_some_and(|c| c.abs().is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> RatFunc {
        RatFunc::var(Var::coeff(i))
    }

    #[test]
    fn cancels_common_factors() {
        let a1a2 = v(1).mul(&v(2));
        let q = a1a2.div(&v(2).mul(&v(1))).unwrap();
        assert!(q.is_one());
        let r = v(1).div(&v(1).pow(2).unwrap()).unwrap();
        assert_eq!(r, v(1).inv().unwrap());
    }

    #[test]
    fn denominator_sign_is_positive() {
        let r = RatFunc::new(Poly::var(Var::coeff(1)), -&Poly::var(Var::coeff(2))).unwrap();
        assert!(r.den().leading_coeff_sign().is_gt());
        assert!(r.is_negative_leading());
    }

    #[test]
    fn rational_constants_reduce() {
        let r = RatFunc::new(Poly::constant(BigInt::from(6)), Poly::constant(BigInt::from(-4))).unwrap();
        assert_eq!(r.as_constant(), Some(BigRational::new(BigInt::from(-3), BigInt::from(2))));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(RatFunc::new(Poly::one(), Poly::zero()), Err(Error::DivisionByZero));
        assert_eq!(RatFunc::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn sum_over_distinct_denominators() {
        // 1/A1 + 1/A2 - (A1 + A2)/(A1 A2) = 0
        let s = v(1).inv().unwrap().add(&v(2).inv().unwrap());
        let t = v(1).add(&v(2)).div(&v(1).mul(&v(2))).unwrap();
        assert!(s.sub(&t).is_zero());
    }
}
