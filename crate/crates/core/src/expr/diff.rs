use std::cell::RefCell;
use std::collections::HashMap;

use super::{Expr, Node, Var};

const CACHE_LIMIT: usize = 2_000_000;

thread_local! {
    // Keyed by node address; the stored source clone keeps the address alive
    // so it cannot be reused by a different node while the entry exists.
    static CACHE: RefCell<HashMap<(usize, Var), (Expr, Expr)>> = RefCell::new(HashMap::new());
}

/// Drops the per-thread derivative cache.
pub fn clear_diff_cache() {
    CACHE.with(|c| c.borrow_mut().clear());
}

fn cached(e: &Expr, v: Var) -> Option<Expr> {
    CACHE.with(|c| c.borrow().get(&(e.id(), v)).map(|(_, d)| d.clone()))
}

/// Formal partial derivative with respect to `v`.
///
/// Results are memoized per thread on node identity, so differentiating a
/// shared subtree twice costs one traversal.
///
/// ```
/// use lpde::expr::{diff, ex, eq_expr, EqOracle, Var};
/// let o = EqOracle::default();
/// assert!(eq_expr(&diff(&ex("x^2*y"), Var::X), &ex("2*x*y"), &o).unwrap());
/// assert!(eq_expr(&diff(&ex("1/y"), Var::Y), &ex("-1/y^2"), &o).unwrap());
/// ```
pub fn diff(e: &Expr, v: Var) -> Expr {
    if let Some(d) = cached(e, v) {
        return d;
    }
    let mut stack: Vec<(Expr, bool)> = vec![(e.clone(), false)];
    while let Some((node, ready)) = stack.pop() {
        if cached(&node, v).is_some() {
            continue;
        }
        if !ready {
            stack.push((node.clone(), true));
            for c in node.children() {
                if cached(c, v).is_none() {
                    stack.push((c.clone(), false));
                }
            }
            continue;
        }
        let d = rule(&node, v);
        CACHE.with(|c| {
            let mut map = c.borrow_mut();
            if map.len() >= CACHE_LIMIT {
                map.clear();
            }
            map.insert((node.id(), v), (node.clone(), d));
        });
    }
    match cached(e, v) {
        Some(d) => d,
        // The cache was cleared mid-traversal; recompute with a fresh cache.
        None => diff(e, v),
    }
}

fn rule(e: &Expr, v: Var) -> Expr {
    let d = |c: &Expr| cached(c, v).unwrap_or_else(|| diff(c, v));
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Sum(ts) => Expr::sum(ts.iter().map(d)),
        Node::Difference(a, b) => Expr::difference(d(a), d(b)),
        Node::Product(fs) => {
            let mut terms = Vec::new();
            for (i, fi) in fs.iter().enumerate() {
                let dfi = d(fi);
                if dfi.is_zero_literal() {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                for (j, fj) in fs.iter().enumerate() {
                    factors.push(if i == j { dfi.clone() } else { fj.clone() });
                }
                terms.push(Expr::product(factors));
            }
            Expr::sum(terms)
        }
        Node::Quotient(a, b) => {
            let da = d(a);
            let db = d(b);
            if db.is_zero_literal() {
                Expr::quotient(da, b.clone())
            } else {
                Expr::quotient(Expr::difference(da * b, a * db), b.pow(2))
            }
        }
        Node::Power(b, n) => {
            let db = d(b);
            if db.is_zero_literal() {
                Expr::zero()
            } else {
                Expr::product([Expr::int(*n as i64), b.pow(n - 1), db])
            }
        }
    }
}
