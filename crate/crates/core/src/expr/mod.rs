//! Exact symbolic kernel.
//!
//! An [`Expr`] is an immutable, reference-counted tree over exact rationals in
//! the two variables `x` and `y`. Subtrees are shared freely, so large
//! expressions produced by repeated differentiation are DAGs; every traversal
//! in this module memoizes on node identity to stay linear in the number of
//! distinct nodes.
//!
//! Constructors apply only light simplification: constant folding, removal of
//! `0`/`1` identities and flattening of nested sums and products. Deciding
//! whether an expression vanishes is left to the probabilistic
//! [`eq_zero`](oracle::eq_zero).

mod diff;
mod eval;
mod linalg;
mod normal;
mod oracle;
mod parse;
mod print;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use diff::{clear_diff_cache, diff};
pub use eval::{eval, eval_mod, Point, Program};
pub use linalg::{inv2, solve_linear, Mat2, Vec2};
pub use normal::{normalize, pretty, RationalFunction};
pub use oracle::{eq_expr, eq_zero, Arithmetic, EqOracle};
pub use parse::parse_expr;

/// Exact rational number; `num` keeps it reduced with a positive denominator.
pub type Rat = BigRational;

/// Errors raised by the symbolic kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("literal zero denominator at offset {offset}")]
    ZeroDenominator { offset: usize },
    #[error("pole: a denominator vanishes at the evaluation point")]
    Pole,
    #[error("sampling exhausted: no pole-free point found after {retries} retries")]
    SamplingExhausted { retries: u32 },
    #[error("singular system: no admissible pivot in column {column}")]
    SingularSystem { column: usize },
    #[error("singular matrix: determinant vanishes")]
    SingularMatrix,
}

/// One of the two independent variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub const ALL: [Var; 2] = [Var::X, Var::Y];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
        }
    }

    pub fn from_index(i: usize) -> Var {
        match i {
            0 => Var::X,
            1 => Var::Y,
            _ => panic!("variable index {i} out of range"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

/// A node of the expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Rat),
    Var(Var),
    Sum(Vec<Expr>),
    Difference(Expr, Expr),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    /// Integer power with a nonzero exponent other than one.
    Power(Expr, i32),
}

/// Immutable shared handle to an expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Address of the shared node, used as a memoization key.
    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn constant(value: Rat) -> Expr {
        Expr::from_node(Node::Const(value))
    }

    pub fn int(value: i64) -> Expr {
        Expr::constant(Rat::from_integer(BigInt::from(value)))
    }

    pub fn ratio(numer: i64, denom: i64) -> Expr {
        Expr::constant(Rat::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(v: Var) -> Expr {
        Expr::from_node(Node::Var(v))
    }

    pub fn x() -> Expr {
        Expr::var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::var(Var::Y)
    }

    pub fn as_const(&self) -> Option<&Rat> {
        match self.node() {
            Node::Const(r) => Some(r),
            _ => None,
        }
    }

    /// True for the literal constant zero (structural, not semantic).
    pub fn is_zero_literal(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_const().is_some_and(One::is_one)
    }

    /// N-ary sum with flattening and constant folding.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Rat::zero();
        let mut rest = Vec::new();
        for t in terms {
            match t.node() {
                Node::Const(c) => constant += c,
                Node::Sum(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(c) => constant += c,
                            _ => rest.push(u.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        if !constant.is_zero() {
            rest.insert(0, Expr::constant(constant));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::from_node(Node::Sum(rest)),
        }
    }

    /// N-ary product with flattening and constant folding.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut constant = Rat::one();
        let mut rest = Vec::new();
        for f in factors {
            match f.node() {
                Node::Const(c) => constant *= c,
                Node::Product(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(c) => constant *= c,
                            _ => rest.push(u.clone()),
                        }
                    }
                }
                _ => rest.push(f),
            }
            if constant.is_zero() {
                return Expr::zero();
            }
        }
        if rest.is_empty() {
            return Expr::constant(constant);
        }
        if !constant.is_one() {
            rest.insert(0, Expr::constant(constant));
        }
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Expr::from_node(Node::Product(rest))
        }
    }

    pub fn difference(a: Expr, b: Expr) -> Expr {
        if b.is_zero_literal() {
            return a;
        }
        if a.is_zero_literal() {
            return -b;
        }
        if a.ptr_eq(&b) {
            return Expr::zero();
        }
        if let (Some(p), Some(q)) = (a.as_const(), b.as_const()) {
            return Expr::constant(p - q);
        }
        Expr::from_node(Node::Difference(a, b))
    }

    /// Quotient `a / b`.
    ///
    /// Panics when `b` is the literal constant zero; quotient denominators are
    /// never structurally zero.
    pub fn quotient(a: Expr, b: Expr) -> Expr {
        assert!(!b.is_zero_literal(), "quotient by the literal constant zero");
        if a.is_zero_literal() || b.is_one_literal() {
            return a;
        }
        if a.ptr_eq(&b) {
            return Expr::one();
        }
        if let (Some(p), Some(q)) = (a.as_const(), b.as_const()) {
            return Expr::constant(p / q);
        }
        if let Some(q) = b.as_const() {
            return Expr::product([Expr::constant(q.recip()), a]);
        }
        Expr::from_node(Node::Quotient(a, b))
    }

    /// Integer power; negative exponents are quotients in disguise.
    pub fn pow(&self, n: i32) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        match self.node() {
            Node::Const(c) => {
                assert!(!(c.is_zero() && n < 0), "negative power of the literal constant zero");
                Expr::constant(num_traits::pow::Pow::pow(c, n))
            }
            Node::Power(base, m) => match m.checked_mul(n) {
                Some(k) => base.pow(k),
                None => Expr::from_node(Node::Power(self.clone(), n)),
            },
            _ => Expr::from_node(Node::Power(self.clone(), n)),
        }
    }

    pub fn recip(&self) -> Expr {
        Expr::quotient(Expr::one(), self.clone())
    }

    pub fn square(&self) -> Expr {
        self.pow(2)
    }

    /// Number of distinct nodes reachable from this one.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            stack.extend(e.children().cloned());
        }
        seen.len()
    }

    pub(crate) fn children(&self) -> impl Iterator<Item = &Expr> {
        let slice: Vec<&Expr> = match self.node() {
            Node::Const(_) | Node::Var(_) => Vec::new(),
            Node::Sum(ts) | Node::Product(ts) => ts.iter().collect(),
            Node::Difference(a, b) | Node::Quotient(a, b) => vec![a, b],
            Node::Power(b, _) => vec![b],
        };
        slice.into_iter()
    }

    /// Rebuild with a different constant field sign: `-e`.
    fn negated(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            _ => Expr::product([Expr::int(-1), self.clone()]),
        }
    }

    /// Replace every occurrence of `x` and `y` by the given expressions.
    pub fn substitute(&self, x: &Expr, y: &Expr) -> Expr {
        let mut memo: std::collections::HashMap<usize, Expr> = std::collections::HashMap::new();
        let order = postorder(self);
        for e in &order {
            let get = |c: &Expr| memo[&c.id()].clone();
            let out = match e.node() {
                Node::Const(_) => e.clone(),
                Node::Var(Var::X) => x.clone(),
                Node::Var(Var::Y) => y.clone(),
                Node::Sum(ts) => Expr::sum(ts.iter().map(get)),
                Node::Product(ts) => Expr::product(ts.iter().map(get)),
                Node::Difference(a, b) => Expr::difference(get(a), get(b)),
                Node::Quotient(a, b) => Expr::quotient(get(a), get(b)),
                Node::Power(b, n) => get(b).pow(*n),
            };
            memo.insert(e.id(), out);
        }
        memo[&self.id()].clone()
    }
}

/// Distinct nodes of `root` in post-order (children before parents).
pub(crate) fn postorder(root: &Expr) -> Vec<Expr> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<(Expr, bool)> = vec![(root.clone(), false)];
    while let Some((e, expanded)) = stack.pop() {
        if expanded {
            out.push(e);
            continue;
        }
        if !seen.insert(e.id()) {
            continue;
        }
        stack.push((e.clone(), true));
        for c in e.children() {
            if !seen.contains(&c.id()) {
                stack.push((c.clone(), false));
            }
        }
    }
    out
}

impl From<i64> for Expr {
    fn from(v: i64) -> Expr {
        Expr::int(v)
    }
}

impl From<Rat> for Expr {
    fn from(v: Rat) -> Expr {
        Expr::constant(v)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negated()
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.negated()
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $body(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $body(self, rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $body(self.clone(), rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $body(self.clone(), rhs.clone())
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $body(self, Expr::int(rhs))
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $body(self.clone(), Expr::int(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, Expr::difference);
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, Expr::quotient);

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::product(iter)
    }
}

/// Parses with [`parse_expr`], panicking on malformed input. Intended for
/// literals in examples and tests.
pub fn ex(text: &str) -> Expr {
    parse_expr(text).unwrap_or_else(|e| panic!("bad expression literal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_fold_in_sums_and_products() {
        let e = Expr::sum([Expr::int(2), Expr::x(), Expr::int(3)]);
        assert_eq!(e, Expr::sum([Expr::int(5), Expr::x()]));
        let p = Expr::product([Expr::int(2), Expr::x(), Expr::ratio(1, 2)]);
        assert_eq!(p, Expr::x());
        assert!(Expr::product([Expr::x(), Expr::zero()]).is_zero_literal());
    }

    #[test]
    fn nested_sums_flatten() {
        let e = (Expr::x() + Expr::y()) + (Expr::x() + 1);
        match e.node() {
            Node::Sum(ts) => assert_eq!(ts.len(), 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identities_drop() {
        let x = Expr::x();
        assert!((&x - &x).is_zero_literal());
        assert_eq!(&x / 1, x);
        assert!((&x / &x).is_one_literal());
        assert_eq!(x.pow(1), x);
        assert!(x.pow(0).is_one_literal());
        assert_eq!(x.pow(2).pow(3), x.pow(6));
    }

    #[test]
    #[should_panic(expected = "literal constant zero")]
    fn quotient_by_literal_zero_panics() {
        let _ = Expr::x() / Expr::zero();
    }

    #[test]
    fn substitute_replaces_variables() {
        let e = ex("x^2 + y");
        let s = e.substitute(&ex("y"), &ex("2"));
        assert_eq!(s, ex("y^2 + 2"));
    }

    #[test]
    fn dag_size_counts_shared_nodes_once() {
        let x2 = Expr::x().pow(2);
        let e = &x2 * &x2 + &x2;
        // x, x^2, product, sum
        assert_eq!(e.dag_size(), 4);
    }
}
