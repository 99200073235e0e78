//! Relative and absolute invariants, each evaluated in an explicit frame.
//!
//! Subscripts in the formulas below denote frame derivatives: `f_x` is `δ¹f`
//! and `f_y` is `δ²f` for the frame the quantity is evaluated in.

use std::cell::OnceCell;

use serde::Serialize;
use thiserror::Error as ThisError;

use crate::equation::{discriminant, Lpde, Stratum, VanishingFlags};
use crate::error::{Error, Result};
use crate::expr::{eq_zero, EqOracle, Expr, Mat2, Vec2};
use crate::frame::Frame;

/// Why an invariant is undefined for a given input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ThisError)]
pub enum Absence {
    #[error("c-zero: c^d = D0^2*D vanishes identically")]
    CZero,
    #[error("D0 vanishes identically")]
    D0Zero,
    #[error("gamma vanishes identically")]
    GammaZero,
    #[error("gamma0 vanishes identically")]
    Gamma0Zero,
    #[error("chi1 vanishes identically")]
    Chi1Zero,
}

fn absent<T>(a: Absence) -> Result<T> {
    Err(Error::Absent(a))
}

/// Splits typed absences out of hard errors.
fn optional<T>(r: Result<T>) -> Result<Result<T, Absence>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(Error::Absent(a)) => Ok(Err(a)),
        Err(e) => Err(e),
    }
}

fn vadd(a: &Vec2, b: &Vec2) -> Vec2 {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

fn vscale(s: &Expr, v: &Vec2) -> Vec2 {
    [s * &v[0], s * &v[1]]
}

/// Lazily computed invariants of one equation in one frame. Every quantity
/// is built at most once, so derived invariants share subexpressions.
pub struct InvariantContext {
    v: Lpde,
    fr: Frame,
    o: EqOracle,
    d: Expr,
    ab_inv: OnceCell<(Expr, Expr)>,
    ab_over_d: OnceCell<Vec2>,
    d0: OnceCell<Expr>,
    c_inv: OnceCell<Expr>,
    c_zero: OnceCell<Result<bool>>,
    gamma: OnceCell<Result<(Expr, Expr, Expr)>>,
    gamma_zero: OnceCell<Result<bool>>,
    gamma0: OnceCell<Expr>,
    gamma0_zero: OnceCell<Result<bool>>,
    alpha_beta: OnceCell<Result<Vec2>>,
    alpha0_beta0: OnceCell<Result<Vec2>>,
    chi1: OnceCell<Result<Expr>>,
    chi1_zero: OnceCell<Result<bool>>,
}

impl InvariantContext {
    /// Fails with [`Error::Parabolic`] when `D ≡ 0`.
    pub fn new(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<InvariantContext> {
        let d = discriminant(v);
        if d.is_zero_literal() || eq_zero(&d, o)? {
            return Err(Error::Parabolic);
        }
        Ok(InvariantContext {
            v: v.clone(),
            fr: fr.clone(),
            o: o.clone(),
            d,
            ab_inv: OnceCell::new(),
            ab_over_d: OnceCell::new(),
            d0: OnceCell::new(),
            c_inv: OnceCell::new(),
            c_zero: OnceCell::new(),
            gamma: OnceCell::new(),
            gamma_zero: OnceCell::new(),
            gamma0: OnceCell::new(),
            gamma0_zero: OnceCell::new(),
            alpha_beta: OnceCell::new(),
            alpha0_beta0: OnceCell::new(),
            chi1: OnceCell::new(),
            chi1_zero: OnceCell::new(),
        })
    }

    pub fn equation(&self) -> &Lpde {
        &self.v
    }

    pub fn frame(&self) -> &Frame {
        &self.fr
    }

    pub fn oracle(&self) -> &EqOracle {
        &self.o
    }

    fn dx(&self, e: &Expr) -> Expr {
        self.fr.delta(0, e)
    }

    fn dy(&self, e: &Expr) -> Expr {
        self.fr.delta(1, e)
    }

    fn vanishes(&self, cell: &OnceCell<Result<bool>>, e: impl FnOnce() -> Result<Expr>) -> Result<bool> {
        cell.get_or_init(|| Ok(eq_zero(&e()?, &self.o)?)).clone()
    }

    /// `D = B² − 4AC`.
    pub fn d(&self) -> &Expr {
        &self.d
    }

    /// `(a^∂, b^∂)` with
    /// `a^∂ = A C_x − A_x C + B C_y − B_y C − bB + 2aC` and
    /// `b^∂ = A_x B − A B_x + A_y C − A C_y − aB + 2bA`.
    pub fn ab_inv(&self) -> &(Expr, Expr) {
        self.ab_inv.get_or_init(|| {
            let Lpde { uxx: a2, uxy: b2, uyy: c2, ux: a1, uy: b1, .. } = &self.v;
            let a_inv = a2 * self.dx(c2) - self.dx(a2) * c2 + b2 * self.dy(c2) - self.dy(b2) * c2 - b1 * b2
                + Expr::int(2) * a1 * c2;
            let b_inv = self.dx(a2) * b2 - a2 * self.dx(b2) + self.dy(a2) * c2 - a2 * self.dy(c2) - a1 * b2
                + Expr::int(2) * b1 * a2;
            (a_inv, b_inv)
        })
    }

    /// `(a^∂/D, b^∂/D)`.
    pub fn ab_over_d(&self) -> Vec2 {
        self.ab_over_d
            .get_or_init(|| {
                let (a, b) = self.ab_inv();
                [a / &self.d, b / &self.d]
            })
            .clone()
    }

    /// `D0 = δ²(a^∂/D) − δ¹(b^∂/D)`.
    pub fn d0(&self) -> &Expr {
        self.d0.get_or_init(|| {
            let [p, q] = self.ab_over_d();
            self.dy(&p) - self.dx(&q)
        })
    }

    /// `c^∂ = D0²·D`.
    pub fn c_inv(&self) -> &Expr {
        self.c_inv.get_or_init(|| self.d0().square() * &self.d)
    }

    pub fn c_zero(&self) -> Result<bool> {
        self.vanishes(&self.c_zero, || Ok(self.c_inv().clone()))
    }

    /// `A(p_x + p²) + B(p_y + pq) + C(q_y + q²) + ap + bq + c`, the common
    /// shape of `γ` and `γ0`.
    fn gamma_form(&self, p: &Expr, q: &Expr) -> Expr {
        let v = &self.v;
        &v.uxx * (self.dx(p) + p.square())
            + &v.uxy * (self.dy(p) + p * q)
            + &v.uyy * (self.dy(q) + q.square())
            + &v.ux * p
            + &v.uy * q
            + &v.u
    }

    /// `(c1, c2, γ)` with `c1 = −(c^∂)_x/(2c^∂)`, `c2 = −(c^∂)_y/(2c^∂)`.
    pub fn gamma_parts(&self) -> Result<(Expr, Expr, Expr)> {
        self.gamma
            .get_or_init(|| {
                if self.c_zero()? {
                    return absent(Absence::CZero);
                }
                let c = self.c_inv();
                let two_c = Expr::int(2) * c;
                let c1 = -(self.dx(c) / &two_c);
                let c2 = -(self.dy(c) / &two_c);
                let gamma = self.gamma_form(&c1, &c2);
                Ok((c1, c2, gamma))
            })
            .clone()
    }

    pub fn gamma(&self) -> Result<Expr> {
        Ok(self.gamma_parts()?.2)
    }

    pub fn gamma_zero(&self) -> Result<bool> {
        self.vanishes(&self.gamma_zero, || self.gamma())
    }

    /// `γ0`: the form of `γ` with `(a^∂/D, b^∂/D)` in place of `(c1, c2)`.
    pub fn gamma0(&self) -> &Expr {
        self.gamma0.get_or_init(|| {
            let [p, q] = self.ab_over_d();
            self.gamma_form(&p, &q)
        })
    }

    pub fn gamma0_zero(&self) -> Result<bool> {
        self.vanishes(&self.gamma0_zero, || Ok(self.gamma0().clone()))
    }

    /// `(α, β) = 2(a^∂/D, b^∂/D) + D⁻¹δD + 2·D0⁻¹δD0`.
    pub fn alpha_beta(&self) -> Result<Vec2> {
        self.alpha_beta
            .get_or_init(|| {
                if self.c_zero()? {
                    return absent(Absence::D0Zero);
                }
                let d0 = self.d0();
                let two = Expr::int(2);
                let v = vadd(
                    &vadd(&vscale(&two, &self.ab_over_d()), &vscale(&self.d.recip(), &self.fr.grad(&self.d))),
                    &vscale(&(&two / d0), &self.fr.grad(d0)),
                );
                Ok(v)
            })
            .clone()
    }

    /// `(α0, β0) = (a^∂/D, b^∂/D) + γ0⁻¹δγ0`.
    pub fn alpha0_beta0(&self) -> Result<Vec2> {
        self.alpha0_beta0
            .get_or_init(|| {
                if self.gamma0_zero()? {
                    return absent(Absence::Gamma0Zero);
                }
                let g0 = self.gamma0();
                Ok(vadd(&self.ab_over_d(), &vscale(&g0.recip(), &self.fr.grad(g0))))
            })
            .clone()
    }

    /// `M = [[A, B/2], [B/2, C]]`.
    pub fn principal(&self) -> Mat2 {
        self.v.principal()
    }

    /// `χ1 = (α, β) M (α, β)ᵗ`.
    pub fn chi1(&self) -> Result<Expr> {
        self.chi1.get_or_init(|| Ok(self.principal().quadratic(&self.alpha_beta()?))).clone()
    }

    pub fn chi1_zero(&self) -> Result<bool> {
        self.vanishes(&self.chi1_zero, || self.chi1())
    }

    /// `χ = χ1/γ`.
    pub fn chi(&self) -> Result<Expr> {
        let chi1 = self.chi1()?;
        if self.gamma_zero()? {
            return absent(Absence::GammaZero);
        }
        Ok(chi1 / self.gamma()?)
    }

    /// `(α2, β2) = (α, β) M`.
    pub fn alpha2_beta2(&self) -> Result<Vec2> {
        Ok(self.principal().vec_mul(&self.alpha_beta()?))
    }

    /// `(α1, β1) = (α2, β2)/χ1`.
    pub fn alpha1_beta1(&self) -> Result<Vec2> {
        let v = self.alpha2_beta2()?;
        if self.chi1_zero()? {
            return absent(Absence::Chi1Zero);
        }
        Ok(vscale(&self.chi1()?.recip(), &v))
    }

    /// `χ2 = (β2, −α2) M (β2, −α2)ᵗ`.
    pub fn chi2(&self) -> Result<Expr> {
        let [a2, b2] = self.alpha2_beta2()?;
        Ok(self.principal().quadratic(&[b2, -a2]))
    }

    /// `χ0 = (α0, β0) M (α0, β0)ᵗ / γ0`.
    pub fn chi0(&self) -> Result<Expr> {
        let v = self.alpha0_beta0()?;
        Ok(self.principal().quadratic(&v) / self.gamma0())
    }

    /// Vanishing flags and the resulting stratum.
    pub fn stratum(&self) -> Result<Stratum> {
        let c_zero = self.c_zero()?;
        let (gamma, chi1, chi2) = if c_zero {
            (None, None, None)
        } else {
            let chi2 = eq_zero(&self.chi2()?, &self.o)?;
            (Some(self.gamma_zero()?), Some(self.chi1_zero()?), Some(chi2))
        };
        Ok(Stratum::from_flags(VanishingFlags {
            d: false,
            c_inv: Some(c_zero),
            gamma,
            gamma0: Some(self.gamma0_zero()?),
            chi1,
            chi2,
        }))
    }
}

/// `D`, `a^∂`, `b^∂`, `D0` and `c^∂`.
#[derive(Debug, Clone)]
pub struct BaseInvariants {
    pub d: Expr,
    pub a_inv: Expr,
    pub b_inv: Expr,
    pub d0: Expr,
    pub c_inv: Expr,
}

/// ```
/// use lpde::equation::Lpde;
/// use lpde::expr::{eq_expr, ex, EqOracle};
/// use lpde::frame::Frame;
/// use lpde::invariants::base_invariants;
/// let o = EqOracle::default();
/// let b = base_invariants(&Lpde::parse(["1", "0", "-1", "y", "0", "0"]), &Frame::identity(), &o).unwrap();
/// assert!(eq_expr(&b.a_inv, &ex("-2*y"), &o).unwrap());
/// assert!(eq_expr(&b.d0, &ex("-1/2"), &o).unwrap());
/// assert!(eq_expr(&b.c_inv, &ex("1"), &o).unwrap());
/// ```
pub fn base_invariants(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<BaseInvariants> {
    let ctx = InvariantContext::new(v, fr, o)?;
    let (a_inv, b_inv) = ctx.ab_inv().clone();
    Ok(BaseInvariants { d: ctx.d().clone(), a_inv, b_inv, d0: ctx.d0().clone(), c_inv: ctx.c_inv().clone() })
}

#[derive(Debug, Clone)]
pub struct GammaInvariants {
    pub c1: Expr,
    pub c2: Expr,
    pub gamma: Expr,
}

pub fn gamma_invariants(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<GammaInvariants> {
    let (c1, c2, gamma) = InvariantContext::new(v, fr, o)?.gamma_parts()?;
    Ok(GammaInvariants { c1, c2, gamma })
}

#[derive(Debug, Clone)]
pub struct Gamma0Invariant {
    pub gamma0: Expr,
}

pub fn gamma0_invariant(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<Gamma0Invariant> {
    Ok(Gamma0Invariant { gamma0: InvariantContext::new(v, fr, o)?.gamma0().clone() })
}

/// Covariant vectors; an `Err` field records why the vector is undefined.
#[derive(Debug, Clone)]
pub struct CovariantVectors {
    pub alpha_beta: Result<Vec2, Absence>,
    pub alpha0_beta0: Result<Vec2, Absence>,
    pub alpha1_beta1: Result<Vec2, Absence>,
    pub alpha2_beta2: Result<Vec2, Absence>,
}

pub fn covariant_vectors(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<CovariantVectors> {
    let ctx = InvariantContext::new(v, fr, o)?;
    Ok(CovariantVectors {
        alpha_beta: optional(ctx.alpha_beta())?,
        alpha0_beta0: optional(ctx.alpha0_beta0())?,
        alpha1_beta1: optional(ctx.alpha1_beta1())?,
        alpha2_beta2: optional(ctx.alpha2_beta2())?,
    })
}

#[derive(Debug, Clone)]
pub struct ChiInvariants {
    pub chi: Result<Expr, Absence>,
    pub chi1: Result<Expr, Absence>,
    pub chi2: Result<Expr, Absence>,
    pub chi0: Result<Expr, Absence>,
}

pub fn chi_invariants(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<ChiInvariants> {
    let ctx = InvariantContext::new(v, fr, o)?;
    Ok(ChiInvariants {
        chi: optional(ctx.chi())?,
        chi1: optional(ctx.chi1())?,
        chi2: optional(ctx.chi2())?,
        chi0: optional(ctx.chi0())?,
    })
}

/// `f = B⁻²(B⁻¹B_x)_y` and `f1 = (δf)ᵗ [[0, B/2], [B/2, 0]] δf`.
#[derive(Debug, Clone)]
pub struct CaseEInvariants {
    pub f: Expr,
    pub f1: Expr,
}

/// Invariants of an equation of shape `(0, B, 0, 0, 0, 0)`.
pub fn case_e_invariants(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<CaseEInvariants> {
    if !v.is_mixed_only(o)? {
        return Err(Error::Shape);
    }
    let b = &v.uxy;
    let f = b.pow(-2) * fr.delta(1, &(fr.delta(0, b) / b));
    let half = b / 2;
    let form = Mat2::new(Expr::zero(), half.clone(), half, Expr::zero());
    let f1 = form.quadratic(&fr.grad(&f));
    Ok(CaseEInvariants { f, f1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eq_expr, ex};

    fn o() -> EqOracle {
        EqOracle::default()
    }

    fn eq(a: &Expr, b: &str) -> bool {
        eq_expr(a, &ex(b), &o()).unwrap()
    }

    fn veq(v: &Vec2, a: &str, b: &str) -> bool {
        eq(&v[0], a) && eq(&v[1], b)
    }

    fn ctx(c: [&str; 6]) -> InvariantContext {
        InvariantContext::new(&Lpde::parse(c), &Frame::identity(), &o()).unwrap()
    }

    #[test]
    fn base_examples() {
        let id = Frame::identity();
        let b = base_invariants(&Lpde::parse(["1", "0", "-1", "0", "0", "0"]), &id, &o()).unwrap();
        assert!(eq(&b.d, "4") && eq(&b.a_inv, "0") && eq(&b.b_inv, "0") && eq(&b.d0, "0") && eq(&b.c_inv, "0"));
        let b = base_invariants(&Lpde::parse(["1", "0", "-1", "y", "0", "0"]), &id, &o()).unwrap();
        assert!(eq(&b.d, "4") && eq(&b.a_inv, "-2*y") && eq(&b.b_inv, "0") && eq(&b.d0, "-1/2") && eq(&b.c_inv, "1"));
        let b = base_invariants(&Lpde::parse(["1", "0", "-1", "0", "1/y", "0"]), &id, &o()).unwrap();
        assert!(eq(&b.d, "4") && eq(&b.a_inv, "0") && eq(&b.b_inv, "2/y") && eq(&b.d0, "0") && eq(&b.c_inv, "0"));
        let err = base_invariants(&Lpde::parse(["1", "2", "1", "0", "0", "0"]), &id, &o()).unwrap_err();
        assert_eq!(err, Error::Parabolic);
    }

    #[test]
    fn gamma_examples() {
        let id = Frame::identity();
        let g = gamma_invariants(&Lpde::parse(["1", "0", "-1", "y", "0", "1"]), &id, &o()).unwrap();
        assert!(eq(&g.c1, "0") && eq(&g.c2, "0") && eq(&g.gamma, "1"));
        let g = gamma_invariants(&Lpde::parse(["1", "0", "-1", "y", "0", "0"]), &id, &o()).unwrap();
        assert!(eq(&g.gamma, "0"));
        let err = gamma_invariants(&Lpde::parse(["1", "0", "-1", "0", "1/y", "0"]), &id, &o()).unwrap_err();
        assert_eq!(err, Error::Absent(Absence::CZero));
    }

    #[test]
    fn gamma0_examples() {
        assert!(eq(ctx(["1", "0", "-1", "0", "1/y", "0"]).gamma0(), "3/(4*y^2)"));
        assert!(eq(ctx(["1", "0", "-1", "0", "0", "1"]).gamma0(), "1"));
        assert!(eq(ctx(["1", "0", "-1", "0", "0", "0"]).gamma0(), "0"));
    }

    #[test]
    fn covariant_examples() {
        let id = Frame::identity();
        let cv = covariant_vectors(&Lpde::parse(["1", "0", "-1", "y", "0", "0"]), &id, &o()).unwrap();
        assert!(veq(cv.alpha_beta.as_ref().unwrap(), "-y", "0"));
        let cv = covariant_vectors(&Lpde::parse(["1", "0", "-1", "0", "0", "0"]), &id, &o()).unwrap();
        assert_eq!(cv.alpha0_beta0.unwrap_err(), Absence::Gamma0Zero);
        let cv = covariant_vectors(&Lpde::parse(["1", "0", "-1", "0", "1/y", "0"]), &id, &o()).unwrap();
        assert!(veq(cv.alpha0_beta0.as_ref().unwrap(), "0", "-3/(2*y)"));
        assert_eq!(cv.alpha_beta.unwrap_err(), Absence::D0Zero);
        let cv = covariant_vectors(&Lpde::parse(["1", "0", "-1", "0", "0", "1"]), &id, &o()).unwrap();
        assert!(veq(cv.alpha0_beta0.as_ref().unwrap(), "0", "0"));
    }

    #[test]
    fn chi_examples() {
        let id = Frame::identity();
        let c = chi_invariants(&Lpde::parse(["1", "0", "-1", "y", "0", "0"]), &id, &o()).unwrap();
        assert!(eq(c.chi1.as_ref().unwrap(), "y^2"));
        assert_eq!(c.chi.unwrap_err(), Absence::GammaZero);
        let c = chi_invariants(&Lpde::parse(["1", "0", "-1", "y", "0", "1"]), &id, &o()).unwrap();
        assert!(eq(c.chi.as_ref().unwrap(), "y^2"));
        let c = chi_invariants(&Lpde::parse(["1", "0", "-1", "0", "0", "1"]), &id, &o()).unwrap();
        assert!(eq(c.chi0.as_ref().unwrap(), "0"));
        let c = chi_invariants(&Lpde::parse(["1", "0", "-1", "0", "1/y", "0"]), &id, &o()).unwrap();
        assert!(eq(c.chi0.as_ref().unwrap(), "-3"));
    }

    #[test]
    fn alpha1_is_alpha2_over_chi1() {
        let c = ctx(["1", "0", "-1", "y", "x", "0"]);
        let a1 = c.alpha1_beta1().unwrap();
        let a2 = c.alpha2_beta2().unwrap();
        let chi1 = c.chi1().unwrap();
        assert!(eq_expr(&(&a1[0] * &chi1), &a2[0], &o()).unwrap());
        assert!(eq_expr(&(&a1[1] * &chi1), &a2[1], &o()).unwrap());
    }

    #[test]
    fn chi_is_chi1_over_gamma() {
        let c = ctx(["1", "0", "-1", "y", "0", "x"]);
        assert!(eq_expr(&(c.chi().unwrap() * c.gamma().unwrap()), &c.chi1().unwrap(), &o()).unwrap());
    }

    #[test]
    fn case_e_examples() {
        let id = Frame::identity();
        let e = case_e_invariants(&Lpde::parse(["0", "1", "0", "0", "0", "0"]), &id, &o()).unwrap();
        assert!(eq(&e.f, "0") && eq(&e.f1, "0"));
        let e = case_e_invariants(&Lpde::parse(["0", "x*y", "0", "0", "0", "0"]), &id, &o()).unwrap();
        assert!(eq(&e.f, "0") && eq(&e.f1, "0"));
        let e = case_e_invariants(&Lpde::parse(["0", "x^2 + y", "0", "0", "0", "0"]), &id, &o()).unwrap();
        assert!(eq(&e.f, "-2*x/(x^2 + y)^4"));
        assert!(eq(&e.f1, "16*x*(7*x^2 - y)/(x^2 + y)^9"));
        let err = case_e_invariants(&Lpde::parse(["1", "0", "-1", "0", "0", "0"]), &id, &o()).unwrap_err();
        assert_eq!(err, Error::Shape);
    }

    #[test]
    fn stratum_flags() {
        let s = ctx(["1", "0", "-1", "y", "0", "1"]).stratum().unwrap();
        assert_eq!(s.flags.c_inv, Some(false));
        assert_eq!(s.flags.gamma, Some(false));
        let s = ctx(["1", "0", "-1", "0", "0", "0"]).stratum().unwrap();
        assert_eq!(s.flags.gamma, None);
        assert_eq!(s.flags.gamma0, Some(true));
    }
}
