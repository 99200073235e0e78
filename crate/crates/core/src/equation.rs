//! Second-order linear equations `A u_xx + B u_xy + C u_yy + a u_x + b u_y + c u = 0`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{eq_zero, ex, EqOracle, Expr, Mat2};
use crate::frame::Frame;
use crate::invariants::InvariantContext;

/// Coefficient names in file and report order.
pub const COEFF_NAMES: [&str; 6] = ["A", "B", "C", "a", "b", "c"];

/// The coefficient vector `(A, B, C, a, b, c)`, named by the derivative each
/// coefficient multiplies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lpde {
    pub uxx: Expr,
    pub uxy: Expr,
    pub uyy: Expr,
    pub ux: Expr,
    pub uy: Expr,
    pub u: Expr,
}

impl Lpde {
    pub fn new(uxx: Expr, uxy: Expr, uyy: Expr, ux: Expr, uy: Expr, u: Expr) -> Lpde {
        Lpde { uxx, uxy, uyy, ux, uy, u }
    }

    pub fn from_array(c: [Expr; 6]) -> Lpde {
        let [uxx, uxy, uyy, ux, uy, u] = c;
        Lpde { uxx, uxy, uyy, ux, uy, u }
    }

    /// Parses six coefficient expressions. Panics on malformed input;
    /// intended for literals.
    ///
    /// ```
    /// use lpde::equation::Lpde;
    /// let v = Lpde::parse(["1", "0", "-1", "0", "1/y", "0"]);
    /// assert_eq!(v.uy.to_string(), "(1 / y)");
    /// ```
    pub fn parse(c: [&str; 6]) -> Lpde {
        Lpde::from_array(c.map(ex))
    }

    pub fn components(&self) -> [Expr; 6] {
        [self.uxx.clone(), self.uxy.clone(), self.uyy.clone(), self.ux.clone(), self.uy.clone(), self.u.clone()]
    }

    /// The symmetric principal matrix `[[A, B/2], [B/2, C]]`.
    pub fn principal(&self) -> Mat2 {
        let half = &self.uxy / 2;
        Mat2::new(self.uxx.clone(), half.clone(), half, self.uyy.clone())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Lpde {
        Lpde::from_array(self.components().each_ref().map(f))
    }

    /// Componentwise identity test.
    pub fn equiv(&self, other: &Lpde, o: &EqOracle) -> Result<bool> {
        let diffs: Vec<Expr> = self.components().into_iter().zip(other.components()).map(|(a, b)| a - b).collect();
        Ok(o.all_zero(&diffs)?)
    }

    /// Whether the coefficients have the shape `(0, B, 0, 0, 0, 0)`.
    pub fn is_mixed_only(&self, o: &EqOracle) -> Result<bool> {
        let c = self.components();
        Ok(o.all_zero(&[c[0].clone(), c[2].clone(), c[3].clone(), c[4].clone(), c[5].clone()])?
            && !eq_zero(&c[1], o)?)
    }
}

impl fmt::Display for Lpde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, {}, {})", self.uxx, self.uxy, self.uyy, self.ux, self.uy, self.u)
    }
}

/// `D = B² − 4AC`.
pub fn discriminant(v: &Lpde) -> Expr {
    v.uxy.square() - Expr::int(4) * &v.uxx * &v.uyy
}

/// Stratum labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StratumTag {
    CaseA,
    CaseB,
    CaseC,
    CaseD,
    CaseE,
    Parabolic,
}

impl fmt::Display for StratumTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Vanishing flags behind a classification. `None` marks a quantity that is
/// undefined for the input (for example `γ` when `c^∂ ≡ 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VanishingFlags {
    pub d: bool,
    pub c_inv: Option<bool>,
    pub gamma: Option<bool>,
    pub gamma0: Option<bool>,
    pub chi1: Option<bool>,
    pub chi2: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub tag: StratumTag,
    pub flags: VanishingFlags,
}

impl Stratum {
    /// Applies the decision table to a set of flags.
    pub fn from_flags(flags: VanishingFlags) -> Stratum {
        let tag = if flags.d {
            StratumTag::Parabolic
        } else if flags.c_inv == Some(false) {
            match (flags.gamma, flags.chi1) {
                (Some(false), _) => StratumTag::CaseA,
                (_, Some(false)) => StratumTag::CaseB,
                _ => StratumTag::CaseC,
            }
        } else if flags.gamma0 == Some(false) {
            StratumTag::CaseD
        } else {
            StratumTag::CaseE
        };
        Stratum { tag, flags }
    }
}

/// Classifies `v` with every invariant evaluated in `fr`.
///
/// ```
/// use lpde::equation::{classify, Lpde, StratumTag};
/// use lpde::expr::EqOracle;
/// use lpde::frame::Frame;
/// let s = classify(&Lpde::parse(["1", "0", "-1", "y", "0", "1"]), &Frame::identity(), &EqOracle::default()).unwrap();
/// assert_eq!(s.tag, StratumTag::CaseA);
/// ```
pub fn classify(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<Stratum> {
    match InvariantContext::new(v, fr, o) {
        Ok(ctx) => ctx.stratum(),
        Err(Error::Parabolic) => Ok(Stratum::from_flags(VanishingFlags {
            d: true,
            c_inv: None,
            gamma: None,
            gamma0: None,
            chi1: None,
            chi2: None,
        })),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::eq_expr;

    fn o() -> EqOracle {
        EqOracle::default()
    }

    #[test]
    fn discriminants() {
        assert!(eq_expr(&discriminant(&Lpde::parse(["1", "0", "-1", "0", "0", "0"])), &ex("4"), &o()).unwrap());
        assert!(eq_zero(&discriminant(&Lpde::parse(["1", "2", "1", "0", "0", "0"])), &o()).unwrap());
        assert!(eq_expr(&discriminant(&Lpde::parse(["y", "0", "-1", "0", "0", "0"])), &ex("4*y"), &o()).unwrap());
    }

    #[test]
    fn classification_examples() {
        let id = Frame::identity();
        let tag = |c: [&str; 6]| classify(&Lpde::parse(c), &id, &o()).unwrap().tag;
        assert_eq!(tag(["1", "0", "-1", "y", "0", "1"]), StratumTag::CaseA);
        assert_eq!(tag(["1", "0", "-1", "y", "0", "0"]), StratumTag::CaseB);
        assert_eq!(tag(["1", "0", "-1", "0", "1/y", "0"]), StratumTag::CaseD);
        assert_eq!(tag(["1", "0", "-1", "0", "0", "0"]), StratumTag::CaseE);
        assert_eq!(tag(["1", "2", "1", "0", "0", "0"]), StratumTag::Parabolic);
    }

    #[test]
    fn decision_table_partitions_flags() {
        let base = VanishingFlags { d: false, c_inv: Some(false), gamma: Some(true), gamma0: None, chi1: Some(true), chi2: None };
        assert_eq!(Stratum::from_flags(base).tag, StratumTag::CaseC);
        assert_eq!(Stratum::from_flags(VanishingFlags { chi1: Some(false), ..base }).tag, StratumTag::CaseB);
        assert_eq!(Stratum::from_flags(VanishingFlags { gamma: Some(false), ..base }).tag, StratumTag::CaseA);
        let flat = VanishingFlags { c_inv: Some(true), gamma: None, chi1: None, gamma0: Some(true), ..base };
        assert_eq!(Stratum::from_flags(flat).tag, StratumTag::CaseE);
        assert_eq!(Stratum::from_flags(VanishingFlags { gamma0: Some(false), ..flat }).tag, StratumTag::CaseD);
    }

    #[test]
    fn principal_matrix() {
        let v = Lpde::parse(["x", "2*y", "3", "0", "0", "0"]);
        assert!(v.principal().equiv(&Mat2::new(ex("x"), ex("y"), ex("y"), ex("3")), &o()).unwrap());
    }
}
