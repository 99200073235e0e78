use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{postorder, Expr, ExprError, Node, Rat, Var};

/// Evaluation site for identity testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Point {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Point {
        Point::new(Rat::from_integer(x.into()), Rat::from_integer(y.into()))
    }
}

#[derive(Debug, Clone)]
enum Instr {
    Const(Rat),
    Var(Var),
    Sum(Vec<usize>),
    Difference(usize, usize),
    Product(Vec<usize>),
    Quotient(usize, usize),
    Power(usize, i32),
}

/// A set of expressions flattened into a straight-line program over their
/// shared DAG, evaluated once per point.
#[derive(Debug, Clone)]
pub struct Program {
    instrs: Vec<Instr>,
    outputs: Vec<usize>,
}

impl Program {
    pub fn new(roots: &[Expr]) -> Program {
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut instrs = Vec::new();
        let mut outputs = Vec::with_capacity(roots.len());
        for root in roots {
            if !slot.contains_key(&root.id()) {
                for e in postorder(root) {
                    if slot.contains_key(&e.id()) {
                        continue;
                    }
                    let s = |c: &Expr| slot[&c.id()];
                    let instr = match e.node() {
                        Node::Const(r) => Instr::Const(r.clone()),
                        Node::Var(v) => Instr::Var(*v),
                        Node::Sum(ts) => Instr::Sum(ts.iter().map(s).collect()),
                        Node::Product(ts) => Instr::Product(ts.iter().map(s).collect()),
                        Node::Difference(a, b) => Instr::Difference(s(a), s(b)),
                        Node::Quotient(a, b) => Instr::Quotient(s(a), s(b)),
                        Node::Power(b, n) => Instr::Power(s(b), *n),
                    };
                    slot.insert(e.id(), instrs.len());
                    instrs.push(instr);
                }
            }
            outputs.push(slot[&root.id()]);
        }
        Program { instrs, outputs }
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    fn run<D: Domain>(&self, dom: &D, x: D::V, y: D::V) -> Result<Vec<D::V>, ExprError> {
        let mut vals: Vec<D::V> = Vec::with_capacity(self.instrs.len());
        for instr in &self.instrs {
            let v = match instr {
                Instr::Const(r) => dom.constant(r)?,
                Instr::Var(Var::X) => x.clone(),
                Instr::Var(Var::Y) => y.clone(),
                Instr::Sum(ts) => {
                    let mut acc = vals[ts[0]].clone();
                    for &t in &ts[1..] {
                        acc = dom.add(&acc, &vals[t]);
                    }
                    acc
                }
                Instr::Product(ts) => {
                    let mut acc = vals[ts[0]].clone();
                    for &t in &ts[1..] {
                        acc = dom.mul(&acc, &vals[t]);
                    }
                    acc
                }
                Instr::Difference(a, b) => dom.sub(&vals[*a], &vals[*b]),
                Instr::Quotient(a, b) => {
                    let inv = dom.inv(&vals[*b])?;
                    dom.mul(&vals[*a], &inv)
                }
                Instr::Power(b, n) => {
                    let base = if *n < 0 { dom.inv(&vals[*b])? } else { vals[*b].clone() };
                    dom.pow(&base, n.unsigned_abs())
                }
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|&o| vals[o].clone()).collect())
    }

    /// Exact values of every root at `p`.
    pub fn eval_exact(&self, p: &Point) -> Result<Vec<Rat>, ExprError> {
        self.run(&Exact, p.x.clone(), p.y.clone())
    }

    /// Values of every root at `p` reduced modulo `prime` (which must be a
    /// prime below 2^62). A denominator divisible by `prime` reports a pole.
    pub fn eval_mod(&self, p: &Point, prime: u64) -> Result<Vec<u64>, ExprError> {
        let dom = Modular::new(prime);
        let x = dom.constant(&p.x)?;
        let y = dom.constant(&p.y)?;
        self.run(&dom, x, y)
    }
}

/// Exact value of `e` at `p`.
///
/// ```
/// use lpde::expr::{eval, ex, ExprError, Point, Rat};
/// assert_eq!(eval(&ex("x/y"), &Point::from_ints(1, 2)).unwrap(), Rat::new(1.into(), 2.into()));
/// assert_eq!(eval(&ex("x/y"), &Point::from_ints(1, 0)), Err(ExprError::Pole));
/// ```
pub fn eval(e: &Expr, p: &Point) -> Result<Rat, ExprError> {
    Ok(Program::new(std::slice::from_ref(e)).eval_exact(p)?.remove(0))
}

/// Value of `e` at `p` modulo `prime`.
pub fn eval_mod(e: &Expr, p: &Point, prime: u64) -> Result<u64, ExprError> {
    Ok(Program::new(std::slice::from_ref(e)).eval_mod(p, prime)?.remove(0))
}

trait Domain {
    type V: Clone;
    fn constant(&self, r: &Rat) -> Result<Self::V, ExprError>;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn inv(&self, a: &Self::V) -> Result<Self::V, ExprError>;
    fn one(&self) -> Self::V;

    fn pow(&self, base: &Self::V, mut n: u32) -> Self::V {
        let mut acc = self.one();
        let mut b = base.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            n >>= 1;
            if n > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
}

struct Exact;

impl Domain for Exact {
    type V = Rat;
    fn constant(&self, r: &Rat) -> Result<Rat, ExprError> {
        Ok(r.clone())
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn inv(&self, a: &Rat) -> Result<Rat, ExprError> {
        if a.is_zero() {
            Err(ExprError::Pole)
        } else {
            Ok(a.recip())
        }
    }
    fn one(&self) -> Rat {
        Rat::from_integer(1.into())
    }
}

struct Modular {
    p: u64,
}

impl Modular {
    fn new(p: u64) -> Modular {
        assert!(p > 2 && p < (1 << 62), "modulus out of range");
        Modular { p }
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }
}

impl Domain for Modular {
    type V = u64;
    fn constant(&self, r: &Rat) -> Result<u64, ExprError> {
        let num = if r.numer().is_negative() || r.numer().bits() > 62 {
            self.reduce_int(r.numer())
        } else {
            r.numer().to_u64().unwrap() % self.p
        };
        let den = self.reduce_int(r.denom());
        let inv = self.inv(&den)?;
        Ok(self.mul(&num, &inv))
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> Result<u64, ExprError> {
        if *a == 0 {
            return Err(ExprError::Pole);
        }
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }
    fn one(&self) -> u64 {
        1
    }
}
