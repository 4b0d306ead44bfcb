//! Exact symbolic expressions over ℚ in jet coordinates.

mod calculus;
mod eval;
mod expr;
mod gcd;
mod parse;
mod poly;
mod ratfunc;
mod var;

pub use calculus::{diff_total, diff_x, ensure_no_xi, partial, split_linear, substitute};
pub use eval::{
    eval_numeric, eval_with, is_zero, is_zero_with, Point, ZeroVerdict, DEFAULT_ZERO_TEST_POINTS, DENOMINATOR_THRESHOLD,
};
pub use expr::{rational_to_f64, Expr, Node};
pub use gcd::gcd;
pub use parse::{parse_expr, parse_expr_y};
pub use poly::{Monomial, Poly};
pub use ratfunc::RatFunc;
pub use var::{Func, FuncAtom, JetVar, Var, XiSym, MAX_DIMENSION, MAX_JET_ORDER};
