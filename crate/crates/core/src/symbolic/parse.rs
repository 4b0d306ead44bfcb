//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than `*` and `/` and looser than `^`, so
//! `-x1^2` is `-(x1^2)`. Exponents are integers, negative ones written
//! `^(-k)` or `^-k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use crate::error::{Error, Result};

use super::expr::{Expr, Node};
use super::var::{Func, JetVar, Var, MAX_JET_ORDER};

/// Parses `text` in dimension `n`; every index must lie in `1..=n`.
pub fn parse_expr(text: &str, n: usize) -> Result<Expr> {
    Parser::new(text, n, false).parse_all()
}

/// Like [`parse_expr`], additionally accepting `y<k>` as a name for `x<k>`.
/// Transformation components are written in the `y` variables.
pub fn parse_expr_y(text: &str, n: usize) -> Result<Expr> {
    Parser::new(text, n, true).parse_all()
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    n: usize,
    y_alias: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, n: usize, y_alias: bool) -> Self {
        Parser { src, bytes: src.as_bytes(), pos: 0, n, y_alias }
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.describe_here();
            self.err(self.pos, format!("expected `{}`, found {found}", c as char))
        }
    }

    fn describe_here(&mut self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let ch = self.src[self.pos..].chars().next().unwrap();
                format!("`{ch}`")
            }
        }
    }

    fn parse_all(mut self) -> Result<Expr> {
        if self.peek().is_none() {
            return self.err(self.pos, "empty expression");
        }
        let e = self.expr()?;
        if self.peek().is_some() {
            let found = self.describe_here();
            return self.err(self.pos, format!("unexpected {found}"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(Expr::negate(&t));
            } else {
                break;
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = Expr::mul([acc, rhs]);
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                acc = match (acc.node(), rhs.node()) {
                    (Node::Num(p), Node::Num(q)) if !q.is_zero() => Expr::num(p / q),
                    _ => Expr::div(acc, rhs),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            let e = self.unary()?;
            return Ok(Expr::negate(&e));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let k = if self.eat(b'(') {
            let k = self.signed_int()?;
            self.expect(b')')?;
            k
        } else {
            self.signed_int()?
        };
        Ok(Expr::pow(base, k))
    }

    fn signed_int(&mut self) -> Result<i32> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            let found = self.describe_here();
            return self.err(start, format!("expected an integer exponent, found {found}"));
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            return self.err(self.pos, "exponents must be integers");
        }
        let v: i32 = match self.src[start..self.pos].parse() {
            Ok(v) => v,
            Err(_) => return self.err(start, "exponent too large"),
        };
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err(self.pos, "unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => {
                let found = self.describe_here();
                self.err(self.pos, format!("unexpected {found}"))
            }
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut int_end = self.pos;
        while int_end < self.bytes.len() && self.bytes[int_end].is_ascii_digit() {
            int_end += 1;
        }
        let mut end = int_end;
        let mut frac = "";
        if end < self.bytes.len() && self.bytes[end] == b'.' {
            end += 1;
            let fs = end;
            while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                end += 1;
            }
            frac = &self.src[fs..end];
        }
        let int = &self.src[start..int_end];
        if int.is_empty() && frac.is_empty() {
            return self.err(start, "malformed number");
        }
        self.pos = end;
        let digits = format!("{int}{frac}");
        let num: BigInt = digits.parse().expect("ascii digits");
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        Ok(Expr::num(BigRational::new(num, den)))
    }

    fn index(&self, value: usize, pos: usize) -> Result<usize> {
        if value == 0 || value > self.n {
            let _ = pos;
            return Err(Error::IndexOutOfRange { index: value, n: self.n });
        }
        Ok(value)
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = &self.src[start..self.pos];
        if let Some(f) = Func::from_name(word) {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::func(f, arg));
        }
        let bad = || Error::Syntax { pos: start, msg: format!("unknown identifier `{word}`") };
        let num = |s: &str| -> Option<usize> {
            (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok()).flatten()
        };

        if let Some(rest) = word.strip_prefix("xi") {
            let (i, j) = rest.split_once('p').ok_or_else(bad)?;
            let (i, j) = (num(i).ok_or_else(bad)?, num(j).ok_or_else(bad)?);
            return Ok(Expr::xi(self.index(i, start)?, j));
        }
        if let Some(rest) = word.strip_prefix('x') {
            let k = num(rest).ok_or_else(bad)?;
            return Ok(Expr::x(self.index(k, start)?));
        }
        if self.y_alias {
            if let Some(rest) = word.strip_prefix('y') {
                let k = num(rest).ok_or_else(bad)?;
                return Ok(Expr::x(self.index(k, start)?));
            }
        }
        if let Some(rest) = word.strip_prefix('A') {
            let (base, dirs) = match rest.split_once('_') {
                Some((b, d)) => (b, Some(d)),
                None => (rest, None),
            };
            let base = self.index(num(base).ok_or_else(bad)?, start)?;
            let mut js = Vec::new();
            if let Some(d) = dirs {
                if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                for b in d.bytes() {
                    js.push(self.index((b - b'0') as usize, start)?);
                }
                if js.len() > MAX_JET_ORDER {
                    return Err(Error::JetOrderExceeded { order: js.len(), cap: MAX_JET_ORDER });
                }
            }
            return Ok(Expr::var(Var::Jet(JetVar::new(base, &js)?)));
        }
        Err(bad())
    }
}
