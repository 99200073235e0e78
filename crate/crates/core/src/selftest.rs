//! Randomized checks of the laws the library is built on. Each check
//! returns a [`LawOutcome`]; the CLI prints them and the acceptance tests
//! assert on them.

use serde::Serialize;

use crate::canonical::{build_pmap, canonical_form, constant_reducible_canonical, verify_equivalence};
use crate::equation::{classify, Lpde, StratumTag};
use crate::error::{Error, Result};
use crate::expr::{diff, parse_expr, solve_linear, EqOracle, Expr, Mat2, Var, Vec2};
use crate::frame::{is_admissible, Frame};
use crate::gen::{seed_equations, Generator};
use crate::invariants::InvariantContext;
use crate::reduction::{connection_residuals, reduction_report, ConnectionPair};
use crate::transform::{compose_transformations, tau, TransformResult, Transformation};

/// Result of one law over all sampled instances.
#[derive(Debug, Clone, Serialize)]
pub struct LawOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub instances: usize,
    /// First failure, if any.
    pub detail: Option<String>,
}

/// Shared settings: the oracle, the generator seed and how many random
/// transformations each law samples.
#[derive(Debug, Clone)]
pub struct Suite {
    pub oracle: EqOracle,
    pub seed: u64,
    pub samples: usize,
}

impl Default for Suite {
    fn default() -> Suite {
        Suite { oracle: EqOracle::default(), seed: 0, samples: 5 }
    }
}

/// Accumulates instance results for one law.
struct Tally {
    name: &'static str,
    instances: usize,
    detail: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Tally {
        Tally { name, instances: 0, detail: None }
    }

    fn record(&mut self, ok: Result<bool>, what: impl FnOnce() -> String) {
        self.instances += 1;
        if self.detail.is_some() {
            return;
        }
        match ok {
            Ok(true) => {}
            Ok(false) => self.detail = Some(what()),
            Err(e) => self.detail = Some(format!("{}: {e}", what())),
        }
    }

    fn finish(self) -> LawOutcome {
        LawOutcome { name: self.name, passed: self.detail.is_none(), instances: self.instances, detail: self.detail }
    }
}

const TRANSFORMED_STRATA: [StratumTag; 3] = [StratumTag::CaseA, StratumTag::CaseB, StratumTag::CaseD];

fn vsub(a: &Vec2, b: &Vec2) -> [Expr; 2] {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

fn transformed(v: &Lpde, t: &Transformation, o: &EqOracle) -> Result<TransformResult> {
    tau(v, t, &Frame::identity(), o)
}

fn scaling_residuals(tag: StratumTag, v: &Lpde, t: &Transformation, o: &EqOracle) -> Result<Vec<Expr>> {
    let id = Frame::identity();
    let before = InvariantContext::new(v, &id, o)?;
    let r = transformed(v, t, o)?;
    let after = InvariantContext::new(&r.equation, &r.frame, o)?;
    let h = t.h();
    let delta = t.delta();
    let ginv = t.g().inverse_with_det(delta);
    let mut out = vec![
        after.d() - h.square() * delta.square() * before.d(),
        after.d0() - before.d0() / delta,
        after.c_inv() - h.square() * before.c_inv(),
    ];
    match tag {
        StratumTag::CaseA | StratumTag::CaseB => {
            out.push(after.gamma()? - h * before.gamma()?);
            out.extend(vsub(&after.alpha_beta()?, &ginv.mul_vec(&before.alpha_beta()?)));
            out.push(after.chi1()? - h * before.chi1()?);
            if tag == StratumTag::CaseA {
                out.push(after.chi()? - before.chi()?);
            }
        }
        StratumTag::CaseD => {
            out.push(after.gamma0() - h * before.gamma0());
            out.extend(vsub(&after.alpha0_beta0()?, &ginv.mul_vec(&before.alpha0_beta0()?)));
            out.push(after.chi0()? - before.chi0()?);
        }
        _ => {}
    }
    Ok(out)
}

/// Relative invariance of `D, D0, c^∂, γ, γ0, (α, β), (α0, β0), χ, χ1, χ0`
/// under random admissible transformations of every seed equation.
pub fn scaling_laws(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let mut tally = Tally::new("relative invariants scale by h^k Δ^l");
    let mut gen = Generator::new(s.seed);
    for k in 0..s.samples {
        let t = match gen.admissible(o) {
            Ok(t) => t,
            Err(e) => {
                tally.record(Err(e), || format!("transformation {k}"));
                continue;
            }
        };
        for tag in TRANSFORMED_STRATA {
            for (i, v) in seed_equations(tag).iter().enumerate() {
                let ok = scaling_residuals(tag, v, &t, o).and_then(|r| Ok(o.all_zero(&r)?));
                tally.record(ok, || format!("{tag} seed {i}, transformation {k}"));
            }
        }
    }
    tally.finish()
}

/// The stratum tag is unchanged by admissible transformations.
pub fn stratum_invariance(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let mut tally = Tally::new("stratum is invariant");
    let mut gen = Generator::new(s.seed.wrapping_add(1));
    for tag in [StratumTag::CaseA, StratumTag::CaseB, StratumTag::CaseC, StratumTag::CaseD, StratumTag::CaseE] {
        for (i, v) in seed_equations(tag).iter().enumerate() {
            for k in 0..s.samples {
                let ok = gen.admissible(o).and_then(|t| {
                    let r = transformed(v, &t, o)?;
                    Ok(classify(&r.equation, &r.frame, o)?.tag == tag)
                });
                tally.record(ok, || format!("{tag} seed {i}, transformation {k}"));
            }
        }
    }
    tally.finish()
}

/// `τ` with `(1, I)` returns its input unchanged.
pub fn identity_law(_: &Suite) -> LawOutcome {
    let mut tally = Tally::new("identity transformation is exact");
    let id = Frame::identity();
    for tag in TRANSFORMED_STRATA {
        for (i, v) in seed_equations(tag).iter().enumerate() {
            let ok = tau(v, &Transformation::identity(), &id, &EqOracle::default()).map(|r| r.equation == *v);
            tally.record(ok, || format!("{tag} seed {i}"));
        }
    }
    tally.finish()
}

/// Transforming twice equals transforming once by the composite.
pub fn composition_law(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let mut tally = Tally::new("composition of transformations");
    let mut gen = Generator::new(s.seed.wrapping_add(2));
    let seeds: Vec<Lpde> = TRANSFORMED_STRATA.iter().flat_map(|t| seed_equations(*t)).collect();
    for k in 0..s.samples.max(10) {
        let v = &seeds[k % seeds.len()];
        let ok = (|| {
            let id = Frame::identity();
            let t = gen.admissible(o)?;
            let first = tau(v, &t, &id, o)?;
            let t1 = gen.admissible_in(&first.frame, o)?;
            let two_step = tau(&first.equation, &t1, &first.frame, o)?;
            let one_step = tau(v, &compose_transformations(&t, &t1), &id, o)?;
            Ok(two_step.equation.equiv(&one_step.equation, o)? && two_step.frame.equiv(&one_step.frame, o)?)
        })();
        tally.record(ok, || format!("instance {k}"));
    }
    tally.finish()
}

/// Jacobians of maps, in the global or a composed frame, pass both tests.
pub fn jacobians_admissible(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let mut tally = Tally::new("map Jacobians are admissible");
    let mut gen = Generator::new(s.seed.wrapping_add(3));
    for k in 0..s.samples.max(10) {
        let ok = (|| {
            let t = gen.admissible(o)?;
            let global = is_admissible(t.g(), &Frame::identity(), o)?.admissible();
            let base = Frame::identity().compose(t.g(), o)?;
            let t1 = gen.admissible_in(&base, o)?;
            Ok(global && is_admissible(t1.g(), &base, o)?.admissible())
        })();
        tally.record(ok, || format!("instance {k}"));
    }
    tally.finish()
}

/// `diag(1, x)` fails both the symbolic and the commutation test.
pub fn inadmissible_rejected(s: &Suite) -> LawOutcome {
    let mut tally = Tally::new("diag(1, x) is inadmissible");
    let g = Mat2::diag(Expr::one(), Expr::x());
    let ok = is_admissible(&g, &Frame::identity(), &s.oracle).map(|r| !r.symbolic && !r.commutation);
    tally.record(ok, || "diag(1, x)".into());
    tally.finish()
}

fn canonical_instance(v: &Lpde, t: &Transformation, o: &EqOracle) -> Result<[bool; 3]> {
    let id = Frame::identity();
    let r = transformed(v, t, o)?;
    let p = build_pmap(v, &id, o)?;
    let q = build_pmap(&r.equation, &r.frame, o)?;
    let ginv = t.g().inverse_with_det(t.delta());
    let equivariant = o.all_zero(&[&q.p0 - &p.p0 / t.h()])? && q.p1.equiv(&ginv.mul(&p.p1), o)?;
    let c = canonical_form(v, &id, o)?;
    let c1 = canonical_form(&r.equation, &r.frame, o)?;
    let invariant = c.tuple.equiv(&c1.tuple, o)? && c.frame.equiv(&c1.frame, o)?;
    let equivalent = verify_equivalence(v, &id, &r.equation, &r.frame, o)?;
    Ok([equivariant, invariant, equivalent])
}

/// `P0⟨τV⟩ = h⁻¹P0⟨V⟩`, `P1⟨τV⟩ = g⁻¹P1⟨V⟩`, invariance of the canonical
/// pair, and equivalence of each `V` with `τV`, for strata a, b, d.
pub fn canonical_laws(s: &Suite) -> [LawOutcome; 3] {
    let o = &s.oracle;
    let mut tallies = [
        Tally::new("P-map is equivariant"),
        Tally::new("canonical pair is invariant"),
        Tally::new("V is equivalent to its transforms"),
    ];
    let mut gen = Generator::new(s.seed.wrapping_add(4));
    for tag in TRANSFORMED_STRATA {
        let seeds = seed_equations(tag);
        for k in 0..s.samples.max(5) {
            let i = k % seeds.len();
            let outcome = gen.admissible(o).and_then(|t| canonical_instance(&seeds[i], &t, o));
            for (j, tally) in tallies.iter_mut().enumerate() {
                let ok = outcome.as_ref().map(|r| r[j]).map_err(Clone::clone);
                tally.record(ok, || format!("{tag} seed {i}, transformation {k}"));
            }
        }
    }
    tallies.map(Tally::finish)
}

/// Seeds from different strata are never reported equivalent.
pub fn cross_stratum(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let id = Frame::identity();
    let mut tally = Tally::new("different strata are not equivalent");
    for (a, ta) in TRANSFORMED_STRATA.iter().enumerate() {
        for tb in &TRANSFORMED_STRATA[a + 1..] {
            for u in seed_equations(*ta) {
                for v in seed_equations(*tb) {
                    let ok = verify_equivalence(&u, &id, &v, &id, o).map(|e| !e);
                    tally.record(ok, || format!("{u} vs {v}"));
                }
            }
        }
    }
    tally.finish()
}

/// Pullbacks of constant-coefficient equations, in their composed frames.
pub fn constant_pullbacks(s: &Suite) -> Result<Vec<(Lpde, TransformResult)>> {
    let o = &s.oracle;
    let mut gen = Generator::new(s.seed.wrapping_add(5));
    let mut out = Vec::new();
    let fixed = Lpde::parse(["1", "0", "-1", "0", "0", "1"]);
    out.push((fixed.clone(), TransformResult { equation: fixed, frame: Frame::identity() }));
    for _ in 0..s.samples.max(5) {
        let v = gen.constant_equation(o)?;
        let t = gen.admissible(o)?;
        let r = transformed(&v, &t, o)?;
        out.push((v, r));
    }
    Ok(out)
}

/// The connection test accepts every constant-coefficient pullback, with
/// vanishing residuals and integrable connection.
pub fn connection_round_trip(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let mut tally = Tally::new("connection test accepts constant-coefficient pullbacks");
    match constant_pullbacks(s) {
        Ok(cases) => {
            for (v, r) in cases {
                let ok = reduction_report(&r.equation, &r.frame, o).map(|rep| rep.reducible);
                tally.record(ok, || format!("pullback of {v}"));
            }
        }
        Err(e) => tally.record(Err(e), || "generation".into()),
    }
    tally.finish()
}

/// Adding a constant to the solved connection breaks the linear system.
pub fn connection_uniqueness(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let mut tally = Tally::new("connection is unique");
    let id = Frame::identity();
    for v in seed_equations(StratumTag::CaseD).iter().take(3) {
        let ok = (|| {
            let rep = reduction_report(v, &id, o)?;
            let bump = Mat2::new(Expr::zero(), Expr::one(), Expr::zero(), Expr::zero());
            let cp = ConnectionPair { n1: rep.connection.n1.add(&bump), n2: rep.connection.n2.clone() };
            let res: Vec<Expr> = connection_residuals(&rep.data, &cp, &id).iter().flat_map(|m| m.entries()).collect();
            Ok(!o.all_zero(&res)?)
        })();
        tally.record(ok, || format!("{v}"));
    }
    tally.finish()
}

/// Where both deciders are defined on a stratum-d input, they agree.
/// Inputs outside the domain of the canonical test are skipped.
pub fn decider_agreement(s: &Suite) -> LawOutcome {
    let o = &s.oracle;
    let mut tally = Tally::new("deciders agree where both are defined");
    let mut gen = Generator::new(s.seed.wrapping_add(6));
    let id = Frame::identity();
    for v in seed_equations(StratumTag::CaseD) {
        let mut inputs = vec![TransformResult { equation: v.clone(), frame: id.clone() }];
        for _ in 0..s.samples.min(2) {
            if let Ok(r) = gen.admissible(o).and_then(|t| transformed(&v, &t, o)) {
                inputs.push(r);
            }
        }
        for r in inputs {
            match constant_reducible_canonical(&r.equation, &r.frame, o) {
                Err(Error::OutsideW0(_)) => continue,
                canonical => {
                    let ok = canonical.and_then(|c| Ok(c == reduction_report(&r.equation, &r.frame, o)?.reducible));
                    tally.record(ok, || format!("{}", r.equation));
                }
            }
        }
    }
    tally.finish()
}

fn random_rational(gen: &mut Generator) -> Expr {
    let num = gen.polynomial(3, 3);
    let den = Expr::one() + gen.polynomial(2, 2).square();
    num / den
}

/// Mixed partials commute and `diff` obeys the Leibniz rule on random
/// rational functions; printing then parsing gives back the same tree.
pub fn kernel_laws(s: &Suite) -> [LawOutcome; 4] {
    let o = &s.oracle;
    let mut gen = Generator::new(s.seed.wrapping_add(7));
    let mut mixed = Tally::new("mixed partials commute");
    let mut leibniz = Tally::new("Leibniz rule");
    let mut round_trip = Tally::new("parse/print round trip");
    let mut solve = Tally::new("solve_linear back-substitution");
    for k in 0..s.samples.max(20) {
        let f = random_rational(&mut gen);
        let g = random_rational(&mut gen) + Expr::y() * random_rational(&mut gen);
        let fxy = diff(&diff(&f, Var::X), Var::Y) - diff(&diff(&f, Var::Y), Var::X);
        mixed.record(o.all_zero(&[fxy]).map_err(Error::from), || format!("{f}"));
        let fg = &f * &g;
        let rule: Vec<Expr> = Var::ALL.iter().map(|&v| diff(&fg, v) - (diff(&f, v) * &g + &f * diff(&g, v))).collect();
        leibniz.record(o.all_zero(&rule).map_err(Error::from), || format!("{f} and {g}"));
        let text = g.to_string();
        round_trip.record(Ok(parse_expr(&text).map(|e| e == g && e.to_string() == text).unwrap_or(false)), || text);
        if k < s.samples.max(5) {
            let n = 3;
            let a: Vec<Vec<Expr>> = (0..n).map(|_| (0..n).map(|_| gen.polynomial(2, 2)).collect()).collect();
            let b: Vec<Expr> = (0..n).map(|_| gen.polynomial(1, 2)).collect();
            let ok = solve_linear(&a, &b, o).map_err(Error::from).and_then(|x| {
                let residual: Vec<Expr> = a
                    .iter()
                    .zip(&b)
                    .map(|(row, bi)| row.iter().zip(&x).map(|(aij, xj)| aij * xj).sum::<Expr>() - bi)
                    .collect();
                Ok(o.all_zero(&residual)?)
            });
            solve.record(ok, || format!("system {k}"));
        }
    }
    [mixed.finish(), leibniz.finish(), round_trip.finish(), solve.finish()]
}

/// Every law, in report order.
pub fn run_all(s: &Suite) -> Vec<LawOutcome> {
    let mut out = Vec::new();
    out.extend(kernel_laws(s));
    out.push(scaling_laws(s));
    out.push(stratum_invariance(s));
    out.push(identity_law(s));
    out.push(composition_law(s));
    out.push(jacobians_admissible(s));
    out.push(inadmissible_rejected(s));
    out.extend(canonical_laws(s));
    out.push(cross_stratum(s));
    out.push(connection_round_trip(s));
    out.push(connection_uniqueness(s));
    out.push(decider_agreement(s));
    out
}
