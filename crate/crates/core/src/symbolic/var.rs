use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::expr::Expr;

/// Largest derivative order a jet coordinate may carry.
pub const MAX_JET_ORDER: usize = 3;

/// Largest dimension the single-digit jet grammar can address.
pub const MAX_DIMENSION: usize = 9;

/// A derivative coordinate `A_{i,J}`: coefficient `A_i` differentiated along
/// the sorted multi-index `J`.
///
/// Ordering is `(base, |J|, J)` lexicographically, which is the global
/// variable order used by the canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    base: u8,
    len: u8,
    dirs: [u8; MAX_JET_ORDER],
}

impl JetVar {
    pub fn new(base: usize, dirs: &[usize]) -> Result<Self> {
        if base == 0 || base > MAX_DIMENSION {
            return Err(Error::IndexOutOfRange { index: base, n: MAX_DIMENSION });
        }
        if dirs.len() > MAX_JET_ORDER {
            return Err(Error::JetOrderExceeded { order: dirs.len(), cap: MAX_JET_ORDER });
        }
        let mut sorted = [0u8; MAX_JET_ORDER];
        for (slot, &d) in sorted.iter_mut().zip(dirs) {
            if d == 0 || d > MAX_DIMENSION {
                return Err(Error::IndexOutOfRange { index: d, n: MAX_DIMENSION });
            }
            *slot = d as u8;
        }
        sorted[..dirs.len()].sort_unstable();
        Ok(JetVar { base: base as u8, len: dirs.len() as u8, dirs: sorted })
    }

    /// The coefficient `A_i` itself.
    pub fn coefficient(base: usize) -> Self {
        Self::new(base, &[]).expect("coefficient index in range")
    }

    /// Shorthand used throughout the operator tables. Panics on bad indices.
    pub fn of(base: usize, dirs: &[usize]) -> Self {
        Self::new(base, dirs).expect("jet indices in range")
    }

    pub fn base(&self) -> usize {
        self.base as usize
    }

    pub fn order(&self) -> usize {
        self.len as usize
    }

    pub fn dirs(&self) -> Vec<usize> {
        self.dirs[..self.len as usize].iter().map(|&d| d as usize).collect()
    }

    /// `A_{i, J ∪ {k}}`.
    pub fn extend(&self, k: usize) -> Result<Self> {
        let mut dirs = self.dirs();
        dirs.push(k);
        Self::new(self.base(), &dirs)
    }

    /// Largest index referenced by this coordinate.
    pub fn max_index(&self) -> usize {
        self.dirs().into_iter().chain(std::iter::once(self.base())).max().unwrap_or(0)
    }

    /// `A_{i,ii...}`: every derivative direction equals the base index.
    pub fn is_pure_self(&self) -> bool {
        self.dirs[..self.len as usize].iter().all(|&d| d == self.base)
    }

    pub fn latex(&self) -> String {
        let mut s = format!("A_{{{}", self.base);
        for d in self.dirs() {
            s.push_str(&d.to_string());
        }
        s.push('}');
        s
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.base)?;
        if self.len > 0 {
            f.write_str("_")?;
            for d in self.dirs() {
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Formal symbol `ξ^{i(j)}`: the `j`-th derivative of the arbitrary function
/// `ξ^i`, which depends on `x^i` alone.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct XiSym {
    pub index: u8,
    pub order: u8,
}

impl XiSym {
    pub fn new(index: usize, order: usize) -> Self {
        XiSym { index: index as u8, order: order as u8 }
    }

    pub fn latex(&self) -> String {
        let primes = match self.order {
            0 => String::new(),
            1 => "\\prime".to_string(),
            2 => "\\prime\\prime".to_string(),
            3 => "\\prime\\prime\\prime".to_string(),
            k => format!("({k})"),
        };
        if primes.is_empty() {
            format!("\\xi^{{{}}}", self.index)
        } else {
            format!("\\xi^{{{}\\,{}}}", self.index, primes)
        }
    }
}

impl fmt::Display for XiSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "xi{}p{}", self.index, self.order)
    }
}

/// Elementary functions treated as opaque atoms by the canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn apply_f64(self, v: f64) -> Result<f64> {
        match self {
            Func::Exp => Ok(v.exp()),
            Func::Log if v > 0.0 => Ok(v.ln()),
            Func::Sqrt if v >= 0.0 => Ok(v.sqrt()),
            Func::Sin => Ok(v.sin()),
            Func::Cos => Ok(v.cos()),
            Func::Log | Func::Sqrt => Err(Error::NumericDomain(format!("{}({v})", self.name()))),
        }
    }
}

/// An elementary function applied to a canonical argument.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FuncAtom {
    pub func: Func,
    pub arg: Expr,
}

/// A variable of the polynomial ring underlying the canonical form.
///
/// The derived order is the global variable order: independent variables,
/// then jet coordinates, then formal ξ symbols, then function atoms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(u8),
    Jet(JetVar),
    Xi(XiSym),
    Func(Arc<FuncAtom>),
}

impl Var {
    pub fn x(i: usize) -> Var {
        Var::X(i as u8)
    }

    pub fn jet(base: usize, dirs: &[usize]) -> Var {
        Var::Jet(JetVar::of(base, dirs))
    }

    pub fn coeff(i: usize) -> Var {
        Var::Jet(JetVar::coefficient(i))
    }

    pub fn xi(index: usize, order: usize) -> Var {
        Var::Xi(XiSym::new(index, order))
    }

    pub fn as_jet(&self) -> Option<&JetVar> {
        match self {
            Var::Jet(j) => Some(j),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Var::Func(_))
    }

    pub fn latex(&self) -> String {
        match self {
            Var::X(i) => format!("x^{{{i}}}"),
            Var::Jet(j) => j.latex(),
            Var::Xi(s) => s.latex(),
            Var::Func(a) => format!("\\{}\\left({}\\right)", a.func.name(), a.arg.latex()),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::Jet(j) => write!(f, "{j}"),
            Var::Xi(s) => write!(f, "{s}"),
            Var::Func(a) => write!(f, "{}({})", a.func.name(), a.arg),
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_is_sorted() {
        assert_eq!(JetVar::of(1, &[2, 1]), JetVar::of(1, &[1, 2]));
        assert_eq!(JetVar::of(1, &[2, 1]).to_string(), "A1_12");
        assert_ne!(JetVar::of(1, &[2]), JetVar::of(2, &[1]));
    }

    #[test]
    fn order_cap_enforced() {
        assert!(JetVar::new(1, &[1, 1, 1]).is_ok());
        assert_eq!(JetVar::new(1, &[1, 1, 1, 1]), Err(Error::JetOrderExceeded { order: 4, cap: 3 }));
    }

    #[test]
    fn global_order() {
        let mut v = [
            Var::xi(1, 1),
            Var::jet(1, &[2]),
            Var::coeff(2),
            Var::x(2),
            Var::jet(1, &[1, 1]),
            Var::coeff(1),
            Var::x(1),
        ];
        v.sort();
        let s: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        assert_eq!(s, ["x1", "x2", "A1", "A1_2", "A1_11", "A2", "xi1p1"]);
    }
}
