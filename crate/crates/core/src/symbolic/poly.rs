//! Sparse multivariate polynomials with integer coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::var::Var;

/// A power product, stored as `(variable, exponent)` pairs sorted by the
/// global variable order. Exponents are always positive.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(v)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let oe = other.0[j].1;
                j += 1;
                match e.cmp(&oe) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((v.clone(), e - oe)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (v, e) in &self.0 {
            let oe = other.exponent(v);
            if oe > 0 {
                out.push((v.clone(), (*e).min(oe)));
            }
        }
        Monomial(out)
    }

    pub fn without(&self, v: &Var) -> (Monomial, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(w, k)| {
                if w == v {
                    e = *k;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (Monomial(rest), e)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order; earlier variables are more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.0.cmp(&b.0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a.1.cmp(&b.1) {
                    Ordering::Equal => {}
                    ord => return ord,
                },
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over ℤ in the variables of [`Var`]. Terms are kept in a map
/// ordered by [`Monomial`]; the leading term is the last entry.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Monomial::var(v, 1), BigInt::one())
    }

    pub fn term(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<&BigInt> {
        match self.terms.len() {
            1 => self.terms.get(&Monomial::one()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || self.as_constant().is_some()
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff_sign(&self) -> Ordering {
        match self.leading() {
            Some((_, c)) if c.is_negative() => Ordering::Less,
            Some(_) => Ordering::Greater,
            None => Ordering::Equal,
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_scalar(&self, c: &BigInt) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k / c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Positive gcd of all coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    /// The first variable in global order occurring in the polynomial.
    pub fn first_var(&self) -> Option<Var> {
        self.terms.keys().filter_map(|m| m.factors().first().map(|(v, _)| v.clone())).min()
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Formal partial derivative with respect to `v`.
    pub fn derivative(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut f = m.0.clone();
            let idx = f.iter().position(|(w, _)| w == v).expect("exponent > 0");
            if e == 1 {
                f.remove(idx);
            } else {
                f[idx].1 -= 1;
            }
            out.add_term(Monomial(f), c * BigInt::from(e));
        }
        out
    }

    /// Coefficients of `self` as a polynomial in `v`, indexed by degree.
    pub fn to_univariate(&self, v: &Var) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_univariate(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = Monomial::var(v.clone(), e as u32);
            for (t, k) in &c.terms {
                out.add_term(t.mul(&m), k.clone());
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        if let Some((m, c)) = d.as_monomial() {
            let mut terms = BTreeMap::new();
            for (t, k) in &self.terms {
                let (q, r) = k.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                terms.insert(t.div(m)?, q);
            }
            return Some(Poly { terms });
        }
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let tm = rm.div(&dm)?;
            let (tc, rem) = rc.div_rem(&dc);
            if !rem.is_zero() {
                return None;
            }
            r = &r - &d.mul_term(&tm, &tc);
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Evaluates with a caller-supplied valuation of each variable.
    pub fn eval_with<T, E>(
        &self,
        value: &mut impl FnMut(&Var) -> Result<T, E>,
        from_int: impl Fn(&BigInt) -> T,
    ) -> Result<T, E>
    where
        T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
    {
        let mut cache: BTreeMap<&Var, T> = BTreeMap::new();
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = from_int(c);
            for (v, e) in m.factors() {
                let x = match cache.get(v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = value(v)?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                for _ in 0..*e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(Var::x(i))
    }

    #[test]
    fn grlex_leading_term() {
        // x1*x2 + x1^2 + x2^3: degree 3 dominates.
        let p = &(&(&x(1) * &x(2)) + &x(1).pow(2)) + &x(2).pow(3);
        assert_eq!(p.leading().unwrap().0, &Monomial::var(Var::x(2), 3));
        // Among degree-2 monomials x1^2 > x1*x2 > x2^2.
        let q = &(&x(2).pow(2) + &(&x(1) * &x(2))) + &x(1).pow(2);
        assert_eq!(q.leading().unwrap().0, &Monomial::var(Var::x(1), 2));
    }

    #[test]
    fn exact_division() {
        let a = &x(1) + &x(2);
        let b = &x(1) - &x(2);
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&a), Some(b.clone()));
        assert_eq!(prod.exact_div(&b), Some(a.clone()));
        assert_eq!(a.exact_div(&b), None);
        assert_eq!(prod.scale(&BigInt::from(6)).exact_div(&Poly::constant(BigInt::from(4))), None);
    }

    #[test]
    fn univariate_round_trip() {
        let p = &(&(&x(1).pow(2) * &x(2)) + &x(2)) + &Poly::constant(BigInt::from(3));
        let u = p.to_univariate(&Var::x(2));
        assert_eq!(u.len(), 2);
        assert_eq!(Poly::from_univariate(&Var::x(2), &u), p);
    }

    #[test]
    fn derivative_power_rule() {
        let p = x(1).pow(3).scale(&BigInt::from(2));
        assert_eq!(p.derivative(&Var::x(1)), x(1).pow(2).scale(&BigInt::from(6)));
        assert!(p.derivative(&Var::x(2)).is_zero());
    }
}
