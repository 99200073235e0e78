//! Equivariant maps `P = (P0, P1)`, canonical representatives and the
//! equivalence and constant-coefficient tests built on them.
//!
//! `P` satisfies `P0⟨τV⟩ = h⁻¹P0⟨V⟩` and `P1⟨τV⟩ = g⁻¹P1⟨V⟩`, so
//! `τ⟨P⟨V⟩; V⟩` does not depend on the representative of the orbit. The
//! pair (canonical frame, canonical tuple) then characterizes the class.

use serde::Serialize;

use crate::equation::{classify, Lpde, Stratum, StratumTag};
use crate::error::{Error, Result};
use crate::expr::{eq_zero, EqOracle, Expr, Mat2, Vec2};
use crate::frame::Frame;
use crate::invariants::{case_e_invariants, InvariantContext};
use crate::transform::{tau, Transformation};

/// `P0` (gauge part) and `P1` (matrix part) of the equivariant map.
#[derive(Debug, Clone, Serialize)]
pub struct PMap {
    pub p0: Expr,
    pub p1: Mat2,
    pub stratum: Stratum,
}

/// The canonical frame `E·P1` and the canonical tuple `τ⟨(P0, P1); V⟩`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalData {
    pub pmap: PMap,
    pub frame: Frame,
    pub tuple: Lpde,
}

fn outside(what: &str) -> Error {
    Error::OutsideW0(what.to_string())
}

fn nonzero(e: &Expr, what: &str, o: &EqOracle) -> Result<()> {
    if e.is_zero_literal() || eq_zero(e, o)? {
        return Err(outside(what));
    }
    Ok(())
}

fn scaled(s: &Expr, v: &Vec2) -> Vec2 {
    [s * &v[0], s * &v[1]]
}

/// `(β, −α)` from `(α, β)`.
fn rotated(v: Vec2) -> Vec2 {
    let [a, b] = v;
    [b, -a]
}

fn absent_as_outside(e: Error) -> Error {
    match e {
        Error::Absent(a) => Error::OutsideW0(a.to_string()),
        e => e,
    }
}

/// Builds the stratum's `P`-map in `fr`.
///
/// ```
/// use lpde::canonical::build_pmap;
/// use lpde::equation::Lpde;
/// use lpde::expr::{ex, EqOracle, Mat2};
/// use lpde::frame::Frame;
/// let o = EqOracle::default();
/// let p = build_pmap(&Lpde::parse(["1", "0", "-1", "y", "0", "1"]), &Frame::identity(), &o).unwrap();
/// assert!(p.p1.equiv(&Mat2::new(ex("-y"), ex("0"), ex("0"), ex("2*y")), &o).unwrap());
/// ```
pub fn build_pmap(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<PMap> {
    let ctx = InvariantContext::new(v, fr, o)?;
    let stratum = ctx.stratum()?;
    let (p0, c1, c2) = pmap_parts(&ctx, stratum.tag).map_err(absent_as_outside)?;
    let p1 = Mat2::from_columns(c1, c2);
    nonzero(&p1.det(), "det P1 = 0", o)?;
    Ok(PMap { p0, p1, stratum })
}

fn pmap_parts(ctx: &InvariantContext, tag: StratumTag) -> Result<(Expr, Vec2, Vec2)> {
    let fr = ctx.frame();
    let o = ctx.oracle();
    match tag {
        StratumTag::CaseA => {
            let gamma = ctx.gamma()?;
            Ok((gamma.recip(), ctx.alpha_beta()?, fr.grad(&ctx.chi()?)))
        }
        StratumTag::CaseB => {
            let second = scaled(ctx.d0(), &rotated(ctx.alpha1_beta1()?));
            Ok((ctx.chi1()?.recip(), ctx.alpha_beta()?, second))
        }
        StratumTag::CaseC => {
            let chi2 = ctx.chi2()?;
            nonzero(&chi2, "chi2 = 0", o)?;
            let d = ctx.d();
            let second = scaled(&(d * ctx.d0() / &chi2), &rotated(ctx.alpha2_beta2()?));
            Ok((d / &chi2, ctx.alpha_beta()?, second))
        }
        StratumTag::CaseD => {
            Ok((ctx.gamma0().recip(), ctx.alpha0_beta0()?, fr.grad(&ctx.chi0()?)))
        }
        StratumTag::CaseE => {
            let inv = case_e_invariants(ctx.equation(), fr, o)?;
            nonzero(&inv.f, "f = 0", o)?;
            nonzero(&inv.f1, "f1 = 0", o)?;
            let p0 = inv.f.square() / &inv.f1;
            Ok((p0, scaled(&inv.f.recip(), &fr.grad(&inv.f)), scaled(&inv.f1.recip(), &fr.grad(&inv.f1))))
        }
        StratumTag::Parabolic => Err(Error::Parabolic),
    }
}

/// The canonical representative of `v`'s class, computed in `fr`.
pub fn canonical_form(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<CanonicalData> {
    let pmap = build_pmap(v, fr, o)?;
    let t = Transformation::from_matrix(pmap.p0.clone(), pmap.p1.clone(), o)?;
    let r = tau(v, &t, fr, o)?;
    Ok(CanonicalData { pmap, frame: r.frame, tuple: r.equation })
}

/// Outcome of an equivalence test, with the first failing condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    Equivalent,
    NotEquivalent { frame: bool, tuple: bool },
    StratumMismatch(StratumTag, StratumTag),
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        *self == Equivalence::Equivalent
    }
}

/// Compares `u` (in `fr_u`) with `v` (in `fr_v`) through their canonical
/// representatives: equal canonical frames in the global basis and equal
/// canonical tuples. Different strata are never equivalent.
pub fn equivalence_report(u: &Lpde, fr_u: &Frame, v: &Lpde, fr_v: &Frame, o: &EqOracle) -> Result<Equivalence> {
    let su = classify(u, fr_u, o)?;
    let sv = classify(v, fr_v, o)?;
    if su.tag != sv.tag {
        return Ok(Equivalence::StratumMismatch(su.tag, sv.tag));
    }
    let cu = canonical_form(u, fr_u, o)?;
    let cv = canonical_form(v, fr_v, o)?;
    let frame = cu.frame.equiv(&cv.frame, o)?;
    let tuple = cu.tuple.equiv(&cv.tuple, o)?;
    if frame && tuple {
        Ok(Equivalence::Equivalent)
    } else {
        Ok(Equivalence::NotEquivalent { frame, tuple })
    }
}

/// Whether `u` and `v` are equivalent. A stratum mismatch yields `false`.
///
/// ```
/// use lpde::canonical::verify_equivalence;
/// use lpde::equation::Lpde;
/// use lpde::expr::{ex, EqOracle};
/// use lpde::frame::Frame;
/// use lpde::transform::{tau, Transformation};
/// let o = EqOracle::default();
/// let id = Frame::identity();
/// let u = Lpde::parse(["1", "0", "-1", "y", "0", "1"]);
/// let t = Transformation::from_maps(ex("1"), ex("x + y^2"), ex("y"), &o).unwrap();
/// let r = tau(&u, &t, &id, &o).unwrap();
/// assert!(verify_equivalence(&u, &id, &r.equation, &r.frame, &o).unwrap());
/// ```
pub fn verify_equivalence(u: &Lpde, fr_u: &Frame, v: &Lpde, fr_v: &Frame, o: &EqOracle) -> Result<bool> {
    Ok(equivalence_report(u, fr_u, v, fr_v, o)?.holds())
}

/// The twelve canonical-frame derivatives of the canonical tuple.
pub fn canonical_derivatives(data: &CanonicalData) -> Vec<Expr> {
    data.tuple
        .components()
        .iter()
        .flat_map(|c| [data.frame.delta(0, c), data.frame.delta(1, c)])
        .collect()
}

/// Whether every component of the canonical tuple is constant along the
/// canonical frame.
pub fn constant_reducible_canonical(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<bool> {
    let data = canonical_form(v, fr, o)?;
    Ok(o.all_zero(&canonical_derivatives(&data))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eq_expr, ex};

    fn o() -> EqOracle {
        EqOracle::default()
    }

    fn case_a() -> Lpde {
        Lpde::parse(["1", "0", "-1", "y", "0", "1"])
    }

    #[test]
    fn case_a_pmap_and_tuple() {
        let id = Frame::identity();
        let p = build_pmap(&case_a(), &id, &o()).unwrap();
        assert_eq!(p.stratum.tag, StratumTag::CaseA);
        assert!(eq_expr(&p.p0, &ex("1"), &o()).unwrap());
        let c = canonical_form(&case_a(), &id, &o()).unwrap();
        let expected = Lpde::parse(["y^2", "0", "-4*y^2", "-y^2", "-2", "1"]);
        assert!(c.tuple.equiv(&expected, &o()).unwrap());
        assert!(c.frame.matrix().equiv(&p.p1, &o()).unwrap());
        assert!(!constant_reducible_canonical(&case_a(), &id, &o()).unwrap());
    }

    #[test]
    fn inputs_outside_the_domain() {
        let id = Frame::identity();
        let constant = Lpde::parse(["1", "0", "-1", "0", "0", "1"]);
        assert!(matches!(build_pmap(&constant, &id, &o()), Err(Error::OutsideW0(_))));
        let d = Lpde::parse(["1", "0", "-1", "0", "1/y", "0"]);
        assert!(matches!(build_pmap(&d, &id, &o()), Err(Error::OutsideW0(_))));
        let c = Lpde::parse(["1", "0", "-1", "x", "x", "0"]);
        assert_eq!(classify(&c, &id, &o()).unwrap().tag, StratumTag::CaseC);
        assert!(matches!(build_pmap(&c, &id, &o()), Err(Error::OutsideW0(_))));
        let parabolic = Lpde::parse(["1", "2", "1", "0", "0", "0"]);
        assert_eq!(build_pmap(&parabolic, &id, &o()).unwrap_err(), Error::Parabolic);
        assert_eq!(constant_reducible_canonical(&parabolic, &id, &o()).unwrap_err(), Error::Parabolic);
    }

    #[test]
    fn case_c_columns_have_determinant_minus_chi1() {
        // The case-c matrix pairs (α, β) with a multiple of (β2, −α2), so its
        // determinant is a multiple of χ1, which vanishes on that stratum.
        let ctx = InvariantContext::new(&case_a(), &Frame::identity(), &o()).unwrap();
        let m = Mat2::from_columns(ctx.alpha_beta().unwrap(), rotated(ctx.alpha2_beta2().unwrap()));
        assert!(eq_expr(&m.det(), &-ctx.chi1().unwrap(), &o()).unwrap());
    }

    #[test]
    fn case_d_with_varying_chi0() {
        let v = Lpde::parse(["1", "0", "-1", "0", "1/y", "x"]);
        let id = Frame::identity();
        let p = build_pmap(&v, &id, &o()).unwrap();
        assert_eq!(p.stratum.tag, StratumTag::CaseD);
        assert!(!constant_reducible_canonical(&v, &id, &o()).unwrap());
    }

    #[test]
    fn case_e_shape() {
        let id = Frame::identity();
        let v = Lpde::parse(["0", "x^2 + y", "0", "0", "0", "0"]);
        let p = build_pmap(&v, &id, &o()).unwrap();
        assert_eq!(p.stratum.tag, StratumTag::CaseE);
        let flat = Lpde::parse(["0", "x*y", "0", "0", "0", "0"]);
        assert!(matches!(build_pmap(&flat, &id, &o()), Err(Error::OutsideW0(_))));
        let general = Lpde::parse(["1", "0", "-1", "0", "0", "0"]);
        assert_eq!(build_pmap(&general, &id, &o()).unwrap_err(), Error::Shape);
    }

    #[test]
    fn equivariance_and_tuple_invariance_case_a() {
        let id = Frame::identity();
        let v = case_a();
        let t = Transformation::from_maps(ex("1 + x"), ex("x + y^2"), ex("y"), &o()).unwrap();
        let r = tau(&v, &t, &id, &o()).unwrap();
        let p = build_pmap(&v, &id, &o()).unwrap();
        let q = build_pmap(&r.equation, &r.frame, &o()).unwrap();
        assert!(eq_expr(&q.p0, &(&p.p0 / t.h()), &o()).unwrap());
        let ginv = t.g().inverse_with_det(t.delta());
        assert!(q.p1.equiv(&ginv.mul(&p.p1), &o()).unwrap());
        assert!(verify_equivalence(&v, &id, &r.equation, &r.frame, &o()).unwrap());
    }

    #[test]
    fn equivalence_outcomes() {
        let id = Frame::identity();
        let d = Lpde::parse(["1", "0", "-1", "0", "1/y", "x"]);
        assert_eq!(
            equivalence_report(&case_a(), &id, &d, &id, &o()).unwrap(),
            Equivalence::StratumMismatch(StratumTag::CaseA, StratumTag::CaseD)
        );
        assert!(verify_equivalence(&case_a(), &id, &case_a(), &id, &o()).unwrap());
        let other = Lpde::parse(["1", "0", "-1", "y", "0", "2"]);
        assert!(!verify_equivalence(&case_a(), &id, &other, &id, &o()).unwrap());
    }

    #[test]
    fn canonical_of_canonical_is_stable() {
        let id = Frame::identity();
        let c = canonical_form(&case_a(), &id, &o()).unwrap();
        let t = Transformation::from_maps(ex("2"), ex("x*y + x"), ex("y"), &o()).unwrap();
        let r = tau(&case_a(), &t, &id, &o()).unwrap();
        let c1 = canonical_form(&r.equation, &r.frame, &o()).unwrap();
        assert!(c.tuple.equiv(&c1.tuple, &o()).unwrap());
    }
}
