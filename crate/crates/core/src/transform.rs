//! Gauge-and-coordinate transformations `u = h·v` with a change of frame `g`.
//!
//! The action is computed in an arbitrary frame: every derivative in the
//! coefficient formulas is a `δ` of the frame passed in, and the result is
//! reported together with the composed frame `E·g`. Coefficients stay
//! expressions in `x, y`; nothing is re-expressed in new coordinates.

use serde::Serialize;

use crate::equation::Lpde;
use crate::error::{Error, Result};
use crate::expr::{eq_zero, EqOracle, Expr, Mat2};
use crate::frame::Frame;

/// Where the matrix of a transformation came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Source {
    Matrix,
    Maps { xi: Expr, eta: Expr },
}

/// A gauge `h` and a matrix `g` with `Δ = det g`, both checked nonvanishing
/// on construction.
#[derive(Debug, Clone, Serialize)]
pub struct Transformation {
    h: Expr,
    g: Mat2,
    delta: Expr,
    source: Source,
}

fn vanishes(e: &Expr, o: &EqOracle) -> Result<bool> {
    Ok(e.is_zero_literal() || eq_zero(e, o)?)
}

impl Transformation {
    /// `(h, g)` for an arbitrary invertible `g`, admissible or not.
    pub fn from_matrix(h: Expr, g: Mat2, o: &EqOracle) -> Result<Transformation> {
        Transformation::checked(h, g, Source::Matrix, o)
    }

    /// `(h, g)` with `g` the Jacobian of the maps `(ξ, η)` in the global
    /// frame.
    ///
    /// ```
    /// use lpde::expr::{ex, EqOracle};
    /// use lpde::transform::Transformation;
    /// let o = EqOracle::default();
    /// let t = Transformation::from_maps(ex("1"), ex("x + y^2"), ex("y"), &o).unwrap();
    /// assert_eq!(t.g().get(1, 0).to_string(), "(2 * y)");
    /// ```
    pub fn from_maps(h: Expr, xi: Expr, eta: Expr, o: &EqOracle) -> Result<Transformation> {
        Transformation::from_maps_in(h, xi, eta, &Frame::identity(), o)
    }

    /// Maps whose Jacobian is taken in `fr`, so that `g` is admissible
    /// relative to `fr`.
    pub fn from_maps_in(h: Expr, xi: Expr, eta: Expr, fr: &Frame, o: &EqOracle) -> Result<Transformation> {
        let g = fr.jacobian(&xi, &eta);
        Transformation::checked(h, g, Source::Maps { xi, eta }, o)
    }

    pub fn identity() -> Transformation {
        Transformation { h: Expr::one(), g: Mat2::identity(), delta: Expr::one(), source: Source::Matrix }
    }

    fn checked(h: Expr, g: Mat2, source: Source, o: &EqOracle) -> Result<Transformation> {
        if vanishes(&h, o)? {
            return Err(Error::DegenerateTransformation("h = 0"));
        }
        let delta = g.det();
        if vanishes(&delta, o)? {
            return Err(Error::DegenerateTransformation("det g = 0"));
        }
        Ok(Transformation { h, g, delta, source })
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn g(&self) -> &Mat2 {
        &self.g
    }

    /// `Δ = det g`.
    pub fn delta(&self) -> &Expr {
        &self.delta
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    fn is_identity(&self) -> bool {
        self.h.is_one_literal()
            && self.g.entries().iter().zip([true, false, false, true]).all(|(e, one)| {
                if one {
                    e.is_one_literal()
                } else {
                    e.is_zero_literal()
                }
            })
    }
}

/// The transformed equation and the frame it lives in.
#[derive(Debug, Clone)]
pub struct TransformResult {
    pub equation: Lpde,
    pub frame: Frame,
}

/// How the mixed second-order term is expanded.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Mixed {
    /// `(B/2)(δ¹X + δ²Y)`, the form that composes for any `g`.
    Symmetric,
    /// `B·δ¹X` as written for commuting frames.
    Literal,
}

fn coefficients(v: &Lpde, h: &Expr, g: &Mat2, fr: &Frame, mixed: Mixed) -> Lpde {
    let Lpde { uxx: a2, uxy: b2, uyy: c2, ux: a1, uy: b1, u: c0 } = v;
    let two = Expr::int(2);
    let d1 = |e: &Expr| fr.delta(0, e);
    let d2 = |e: &Expr| fr.delta(1, e);
    let [[g11, g12], [g21, g22]] = &g.0;

    let principal = v.principal();
    let quad = |r: usize, s: usize| -> Expr {
        let cr = g.column(r);
        let cs = g.column(s);
        h * principal.mul_vec(&cs).iter().zip(&cr).map(|(m, c)| m * c).sum::<Expr>()
    };
    let uxx = quad(0, 0);
    let uxy = &two * quad(0, 1);
    let uyy = quad(1, 1);

    let h1 = d1(h);
    let h2 = d2(h);
    let first_order = |top: &Expr, bottom: &Expr| -> Expr {
        let mixed_term = match mixed {
            Mixed::Symmetric => b2 * (d1(bottom) + d2(top)) / 2,
            Mixed::Literal => b2 * d1(bottom),
        };
        h * (a2 * d1(top) + mixed_term + c2 * d2(bottom) + a1 * top + b1 * bottom)
            + &two * a2 * &h1 * top
            + b2 * (&h1 * bottom + &h2 * top)
            + &two * c2 * &h2 * bottom
    };
    let ux = first_order(g11, g21);
    let uy = first_order(g12, g22);

    let mixed_h = match mixed {
        Mixed::Symmetric => (d1(&h2) + d2(&h1)) / 2,
        Mixed::Literal => d1(&h2),
    };
    let u = a2 * d1(&h1) + b2 * mixed_h + c2 * d2(&h2) + a1 * &h1 + b1 * &h2 + c0 * h;
    Lpde::new(uxx, uxy, uyy, ux, uy, u)
}

fn apply(v: &Lpde, t: &Transformation, fr: &Frame, o: &EqOracle, mixed: Mixed) -> Result<TransformResult> {
    if t.is_identity() {
        return Ok(TransformResult { equation: v.clone(), frame: fr.clone() });
    }
    let frame = fr.compose(&t.g, o)?;
    Ok(TransformResult { equation: coefficients(v, &t.h, &t.g, fr, mixed), frame })
}

/// Applies `t` to `v` with derivatives taken in `fr`.
///
/// The mixed term `B δ¹δ²` is expanded symmetrically, as
/// `(B/2)(δ¹δ² + δ²δ¹)`. For admissible `g` this agrees with
/// [`tau_literal`]; for arbitrary `g` it is the expansion that respects
/// composition.
///
/// ```
/// use lpde::equation::Lpde;
/// use lpde::expr::{ex, EqOracle};
/// use lpde::frame::Frame;
/// use lpde::transform::{tau, Transformation};
/// let o = EqOracle::default();
/// let t = Transformation::from_maps(ex("1"), ex("x + y^2"), ex("y"), &o).unwrap();
/// let r = tau(&Lpde::parse(["1", "0", "-1", "0", "0", "1"]), &t, &Frame::identity(), &o).unwrap();
/// assert!(r.equation.equiv(&Lpde::parse(["1 - 4*y^2", "-4*y", "-1", "-2", "0", "1"]), &o).unwrap());
/// ```
pub fn tau(v: &Lpde, t: &Transformation, fr: &Frame, o: &EqOracle) -> Result<TransformResult> {
    apply(v, t, fr, o, Mixed::Symmetric)
}

/// [`tau`] with the mixed terms taken verbatim: `B δ¹g²ₖ` in the
/// first-order coefficients and `B δ¹δ²h` in the free term.
pub fn tau_literal(v: &Lpde, t: &Transformation, fr: &Frame, o: &EqOracle) -> Result<TransformResult> {
    apply(v, t, fr, o, Mixed::Literal)
}

/// `(h·h1, g·g1)`: apply `t` first, then `t1` in the frame `t` produced.
pub fn compose_transformations(t: &Transformation, t1: &Transformation) -> Transformation {
    Transformation {
        h: &t.h * &t1.h,
        g: t.g.mul(&t1.g),
        delta: &t.delta * &t1.delta,
        source: Source::Matrix,
    }
}

/// The pure gauge change `u = h·v` in the global frame.
///
/// ```
/// use lpde::equation::Lpde;
/// use lpde::expr::{ex, EqOracle};
/// use lpde::transform::gauge_scale;
/// let o = EqOracle::default();
/// let v1 = gauge_scale(&Lpde::parse(["1", "0", "-1", "0", "0", "0"]), &ex("y"), &o).unwrap();
/// assert!(v1.equiv(&Lpde::parse(["y", "0", "-y", "0", "-2", "0"]), &o).unwrap());
/// ```
pub fn gauge_scale(v: &Lpde, h: &Expr, o: &EqOracle) -> Result<Lpde> {
    if vanishes(h, o)? {
        return Err(Error::ZeroGauge);
    }
    let t = Transformation { h: h.clone(), g: Mat2::identity(), delta: Expr::one(), source: Source::Matrix };
    Ok(tau(v, &t, &Frame::identity(), o)?.equation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::discriminant;
    use crate::expr::{eq_expr, ex};

    fn o() -> EqOracle {
        EqOracle::default()
    }

    fn maps(h: &str, xi: &str, eta: &str) -> Transformation {
        Transformation::from_maps(ex(h), ex(xi), ex(eta), &o()).unwrap()
    }

    fn matrix(h: &str, g: [&str; 4]) -> Transformation {
        let [a, b, c, d] = g.map(ex);
        Transformation::from_matrix(ex(h), Mat2::new(a, b, c, d), &o()).unwrap()
    }

    #[test]
    fn worked_examples() {
        let id = Frame::identity();
        let e = Lpde::parse(["1", "0", "-1", "0", "0", "0"]);
        let r = tau(&e, &matrix("1", ["1", "0", "0", "2"]), &id, &o()).unwrap();
        assert!(r.equation.equiv(&Lpde::parse(["1", "0", "-4", "0", "0", "0"]), &o()).unwrap());
        let v = Lpde::parse(["1", "0", "-1", "0", "0", "1"]);
        let r = tau(&v, &maps("1", "x + y^2", "y"), &id, &o()).unwrap();
        assert!(r.equation.equiv(&Lpde::parse(["1 - 4*y^2", "-4*y", "-1", "-2", "0", "1"]), &o()).unwrap());
        assert!(eq_expr(&discriminant(&r.equation), &ex("4"), &o()).unwrap());
    }

    #[test]
    fn identity_is_exact() {
        let v = Lpde::parse(["x", "y", "1", "x*y", "0", "1/x"]);
        let r = tau(&v, &Transformation::identity(), &Frame::identity(), &o()).unwrap();
        assert_eq!(r.equation, v);
        let r = tau(&v, &matrix("1", ["1", "0", "0", "1"]), &Frame::identity(), &o()).unwrap();
        assert_eq!(r.equation, v);
    }

    #[test]
    fn gauge_examples() {
        let v = Lpde::parse(["x", "y", "1", "x*y", "0", "1/x"]);
        assert!(gauge_scale(&v, &ex("2"), &o()).unwrap().equiv(&v.map(|e| e * 2), &o()).unwrap());
        assert_eq!(gauge_scale(&v, &ex("x - x"), &o()).unwrap_err(), Error::ZeroGauge);
    }

    #[test]
    fn degenerate_inputs() {
        let g = Mat2::new(ex("x"), ex("y"), ex("2*x"), ex("2*y"));
        assert_eq!(
            Transformation::from_matrix(ex("1"), g, &o()).unwrap_err(),
            Error::DegenerateTransformation("det g = 0")
        );
        assert_eq!(
            Transformation::from_matrix(ex("0"), Mat2::identity(), &o()).unwrap_err(),
            Error::DegenerateTransformation("h = 0")
        );
    }

    #[test]
    fn composition_of_transformations() {
        let t = matrix("2", ["1", "0", "0", "1"]);
        let t1 = matrix("3", ["1", "0", "0", "1"]);
        let c = compose_transformations(&t, &t1);
        assert!(eq_expr(c.h(), &ex("6"), &o()).unwrap());
        let c = compose_transformations(&matrix("1", ["1", "0", "0", "2"]), &matrix("1", ["1", "0", "0", "3"]));
        assert!(c.g().equiv(&Mat2::diag(ex("1"), ex("6")), &o()).unwrap());
        let u = maps("x", "x*y", "y");
        let c = compose_transformations(&Transformation::identity(), &u);
        assert!(c.g().equiv(u.g(), &o()).unwrap() && eq_expr(c.h(), u.h(), &o()).unwrap());
    }

    #[test]
    fn quadratic_form_and_determinant_laws() {
        let v = Lpde::parse(["x", "y", "1 + x^2", "x*y", "1", "1/x"]);
        let t = maps("1 + y", "x*y + x", "y^3 - x");
        let fr = Frame::identity();
        let r = tau(&v, &t, &fr, &o()).unwrap();
        let expected = t.g().transpose().mul(&v.principal()).mul(t.g()).scale(t.h());
        assert!(r.equation.principal().equiv(&expected, &o()).unwrap());
        assert!(eq_expr(r.frame.det(), &(fr.det() * t.delta()), &o()).unwrap());
    }

    #[test]
    fn groupoid_law_admissible_pair() {
        let v = Lpde::parse(["1", "x", "-1", "y", "0", "1"]);
        let fr = Frame::identity();
        let t = maps("1 + x", "x + y^2", "y");
        let r = tau(&v, &t, &fr, &o()).unwrap();
        let t1 = Transformation::from_maps_in(ex("y"), ex("x*y"), ex("x - y^2"), &r.frame, &o()).unwrap();
        let two_step = tau(&r.equation, &t1, &r.frame, &o()).unwrap();
        let one_step = tau(&v, &compose_transformations(&t, &t1), &fr, &o()).unwrap();
        assert!(two_step.equation.equiv(&one_step.equation, &o()).unwrap());
        assert!(two_step.frame.equiv(&one_step.frame, &o()).unwrap());
    }

    #[test]
    fn literal_and_symmetric_agree_on_admissible_matrices() {
        let v = Lpde::parse(["1", "x", "-1", "y", "0", "1"]);
        let t = maps("1 + x*y", "x^2 + y", "y - x");
        let fr = Frame::identity();
        let a = tau(&v, &t, &fr, &o()).unwrap();
        let b = tau_literal(&v, &t, &fr, &o()).unwrap();
        assert!(a.equation.equiv(&b.equation, &o()).unwrap());
    }

    #[test]
    fn inadmissible_outer_matrix_composes_only_symmetrically() {
        let v = Lpde::parse(["1", "0", "-1", "y", "0", "1"]);
        let fr = Frame::identity();
        let t = maps("1 + x", "x + y^2", "y");
        let outer = matrix("1", ["-y", "0", "0", "2*y"]);
        let composed = compose_transformations(&t, &outer);
        let run = |f: fn(&Lpde, &Transformation, &Frame, &EqOracle) -> Result<TransformResult>| {
            let r = f(&v, &t, &fr, &o()).unwrap();
            let two_step = f(&r.equation, &outer, &r.frame, &o()).unwrap();
            let one_step = f(&v, &composed, &fr, &o()).unwrap();
            two_step.equation.equiv(&one_step.equation, &o()).unwrap()
        };
        assert!(run(tau));
        assert!(!run(tau_literal));
    }
}
