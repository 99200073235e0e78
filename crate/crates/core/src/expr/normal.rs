//! Best-effort expansion to `numerator / denominator` for display.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{postorder, Expr, Node, Rat, Var};

const MAX_TERMS: usize = 256;
const MAX_NODES: usize = 20_000;

/// Sparse polynomial keyed by `(x exponent, y exponent)`.
type Poly = BTreeMap<(u32, u32), Rat>;

/// Expanded quotient of two polynomials with integer coefficients, common
/// monomial and constant factors removed, and a positive leading
/// denominator coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

/// Expands `e` into a [`RationalFunction`], or `None` when the expansion
/// grows past the internal size limits or hits a pole.
///
/// ```
/// use lpde::expr::{ex, normalize};
/// let e = ex("(x^2 - y^2)/(x - y) + 1/(2*y)");
/// assert_eq!(normalize(&e).unwrap().to_string(), "(2*x*y + 2*y^2 + 1)/(2*y)");
/// ```
pub fn normalize(e: &Expr) -> Option<RationalFunction> {
    if e.dag_size() > MAX_NODES {
        return None;
    }
    let mut memo: HashMap<usize, RationalFunction> = HashMap::new();
    for n in postorder(e) {
        let get = |c: &Expr| memo.get(&c.id()).cloned();
        let value = match n.node() {
            Node::Const(r) => RationalFunction::constant(r.clone()),
            Node::Var(v) => RationalFunction::var(*v),
            Node::Sum(ts) => {
                let mut acc = get(&ts[0])?;
                for t in &ts[1..] {
                    acc = acc.add(&get(t)?)?;
                }
                acc
            }
            Node::Product(ts) => {
                let mut acc = get(&ts[0])?;
                for t in &ts[1..] {
                    acc = acc.mul(&get(t)?)?;
                }
                acc
            }
            Node::Difference(a, b) => get(a)?.add(&get(b)?.neg())?,
            Node::Quotient(a, b) => get(a)?.div(&get(b)?)?,
            Node::Power(b, k) => {
                let base = get(b)?;
                let base = if *k < 0 { RationalFunction::one().div(&base)? } else { base };
                let mut acc = RationalFunction::one();
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        };
        memo.insert(n.id(), value);
    }
    memo.remove(&e.id())
}

/// Normalized text when available, the tree printer otherwise.
pub fn pretty(e: &Expr) -> String {
    match normalize(e) {
        Some(rf) => rf.to_string(),
        None => e.to_string(),
    }
}

fn poly_const(r: Rat) -> Poly {
    let mut p = Poly::new();
    if !r.is_zero() {
        p.insert((0, 0), r);
    }
    p
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (k, v) in b {
        let entry = out.entry(*k).or_insert_with(Rat::zero);
        *entry += v;
        if entry.is_zero() {
            out.remove(k);
        }
    }
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Option<Poly> {
    if a.len() * b.len() > MAX_TERMS * MAX_TERMS {
        return None;
    }
    let mut out = Poly::new();
    for ((ax, ay), av) in a {
        for ((bx, by), bv) in b {
            let key = (ax + bx, ay + by);
            let entry = out.entry(key).or_insert_with(Rat::zero);
            *entry += av * bv;
        }
    }
    out.retain(|_, v| !v.is_zero());
    (out.len() <= MAX_TERMS).then_some(out)
}

fn poly_scale(a: &Poly, s: &Rat) -> Poly {
    a.iter().map(|(k, v)| (*k, v * s)).collect()
}

fn is_const(p: &Poly) -> bool {
    p.keys().all(|k| *k == (0, 0))
}

/// Exact quotient `a / b` under lexicographic order, if `b` divides `a`.
fn poly_div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    let (&(bx, by), bc) = b.iter().next_back()?;
    let mut rem = a.clone();
    let mut quot = Poly::new();
    let mut steps = 0;
    while let Some((&(rx, ry), rc)) = rem.iter().next_back() {
        steps += 1;
        if rx < bx || ry < by || steps > 4 * MAX_TERMS {
            return None;
        }
        let mut term = Poly::new();
        term.insert((rx - bx, ry - by), rc / bc);
        quot = poly_add(&quot, &term);
        let sub = poly_mul(&term, b)?;
        rem = poly_add(&rem, &poly_scale(&sub, &-Rat::one()));
    }
    Some(quot)
}

impl RationalFunction {
    fn constant(r: Rat) -> Self {
        RationalFunction { num: poly_const(r), den: poly_const(Rat::one()) }
    }

    fn one() -> Self {
        Self::constant(Rat::one())
    }

    fn var(v: Var) -> Self {
        let mut num = Poly::new();
        num.insert(if v == Var::X { (1, 0) } else { (0, 1) }, Rat::one());
        RationalFunction { num, den: poly_const(Rat::one()) }
    }

    fn neg(&self) -> Self {
        RationalFunction { num: poly_scale(&self.num, &-Rat::one()), den: self.den.clone() }
    }

    fn add(&self, other: &Self) -> Option<Self> {
        if self.den == other.den {
            return Self::reduced(poly_add(&self.num, &other.num), self.den.clone());
        }
        let num = poly_add(&poly_mul(&self.num, &other.den)?, &poly_mul(&other.num, &self.den)?);
        Self::reduced(num, poly_mul(&self.den, &other.den)?)
    }

    fn mul(&self, other: &Self) -> Option<Self> {
        Self::reduced(poly_mul(&self.num, &other.num)?, poly_mul(&self.den, &other.den)?)
    }

    fn div(&self, other: &Self) -> Option<Self> {
        if other.num.is_empty() {
            return None;
        }
        Self::reduced(poly_mul(&self.num, &other.den)?, poly_mul(&self.den, &other.num)?)
    }

    fn reduced(mut num: Poly, mut den: Poly) -> Option<Self> {
        if num.is_empty() {
            return Some(Self::constant(Rat::zero()));
        }
        // Common monomial factor.
        let min_x = num.keys().chain(den.keys()).map(|k| k.0).min().unwrap_or(0);
        let min_y = num.keys().chain(den.keys()).map(|k| k.1).min().unwrap_or(0);
        if min_x > 0 || min_y > 0 {
            let shift = |p: &Poly| p.iter().map(|((a, b), v)| ((a - min_x, b - min_y), v.clone())).collect();
            num = shift(&num);
            den = shift(&den);
        }
        if !is_const(&den) {
            if let Some(q) = poly_div_exact(&num, &den) {
                num = q;
                den = poly_const(Rat::one());
            } else if let Some(q) = poly_div_exact(&den, &num) {
                num = poly_const(Rat::one());
                den = q;
            }
        }
        // Integer coefficients with no common content.
        let lcm = num.values().chain(den.values()).fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let gcd = num
            .values()
            .chain(den.values())
            .map(|v| v.numer() * (&lcm / v.denom()))
            .fold(BigInt::zero(), |acc, n| acc.gcd(&n));
        let mut scale = Rat::new(lcm, gcd);
        if den.iter().next_back().is_some_and(|(_, c)| c.is_negative()) {
            scale = -scale;
        }
        num = poly_scale(&num, &scale);
        den = poly_scale(&den, &scale);
        if is_const(&den) {
            let d = den[&(0, 0)].clone();
            num = poly_scale(&num, &d.recip());
            den = poly_const(Rat::one());
        }
        Some(RationalFunction { num, den })
    }

    pub fn is_polynomial(&self) -> bool {
        is_const(&self.den)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, x: u32, y: u32) -> fmt::Result {
    let mut first = true;
    for (name, e) in [("x", x), ("y", y)] {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        if e == 1 {
            f.write_str(name)?;
        } else {
            write!(f, "{name}^{e}")?;
        }
    }
    Ok(())
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.is_empty() {
        return f.write_str("0");
    }
    let mut terms: Vec<(&(u32, u32), &Rat)> = p.iter().collect();
    terms.sort_by_key(|((i, j), _)| std::cmp::Reverse((i + j, *i)));
    for (i, (&(x, y), c)) in terms.into_iter().enumerate() {
        if i == 0 {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else if c.is_negative() {
            f.write_str(" - ")?;
        } else {
            f.write_str(" + ")?;
        }
        let mag = c.abs();
        let constant = x == 0 && y == 0;
        if constant {
            write!(f, "{}", mag.numer())?;
        } else {
            if !mag.numer().is_one() {
                write!(f, "{}*", mag.numer())?;
            }
            write_monomial(f, x, y)?;
        }
        if !mag.denom().is_one() {
            write!(f, "/{}", mag.denom())?;
        }
    }
    Ok(())
}

fn is_bare_power(p: &Poly) -> bool {
    if p.len() != 1 {
        return false;
    }
    let (&(x, y), c) = p.iter().next().unwrap();
    (c.is_one() && ((x == 0) != (y == 0))) || (x == 0 && y == 0 && c.denom().is_one() && !c.is_negative())
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write_poly(f, &self.num);
        }
        if self.num.len() > 1 {
            f.write_str("(")?;
            write_poly(f, &self.num)?;
            f.write_str(")")?;
        } else {
            write_poly(f, &self.num)?;
        }
        f.write_str("/")?;
        if is_bare_power(&self.den) {
            write_poly(f, &self.den)
        } else {
            f.write_str("(")?;
            write_poly(f, &self.den)?;
            f.write_str(")")
        }
    }
}
