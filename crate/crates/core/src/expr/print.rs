use std::fmt;

use num_traits::{One, Signed};

use super::{Expr, Node, Rat};

/// Fully parenthesized infix in the parser's grammar.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

/// Serializes as the printed form.
impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn write_rat(r: &Rat, f: &mut impl fmt::Write) -> fmt::Result {
    if r.denom().is_one() {
        if r.is_negative() {
            write!(f, "({})", r.numer())
        } else {
            write!(f, "{}", r.numer())
        }
    } else {
        write!(f, "({}/{})", r.numer(), r.denom())
    }
}

fn write_joined(items: &[Expr], sep: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("(")?;
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write_expr(t, f)?;
    }
    f.write_str(")")
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Const(r) => write_rat(r, f),
        Node::Var(v) => f.write_str(v.name()),
        Node::Sum(ts) => write_joined(ts, " + ", f),
        Node::Product(ts) => write_joined(ts, " * ", f),
        Node::Difference(a, b) => {
            f.write_str("(")?;
            write_expr(a, f)?;
            f.write_str(" - ")?;
            write_expr(b, f)?;
            f.write_str(")")
        }
        Node::Quotient(a, b) => {
            f.write_str("(")?;
            write_expr(a, f)?;
            f.write_str(" / ")?;
            write_expr(b, f)?;
            f.write_str(")")
        }
        Node::Power(b, n) => {
            if matches!(b.node(), Node::Power(..)) {
                f.write_str("(")?;
                write_expr(b, f)?;
                f.write_str(")")?;
            } else {
                write_expr(b, f)?;
            }
            write!(f, "^{n}")
        }
    }
}
