//! Differential frames `δ = E⁻¹∂`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{diff, eq_zero, EqOracle, Expr, Mat2, Var, Vec2};

const CACHE_LIMIT: usize = 500_000;

type DeltaCache = HashMap<(usize, usize), (Expr, Expr)>;

/// A basis of first-order operators, stored as the matrix
/// `E` with `δ = E⁻¹∂`: row `i` of `E⁻¹` expresses `δⁱ` in `∂x, ∂y`.
///
/// Indices are zero-based: `delta(0, e)` is `δ¹e`, `delta(1, e)` is `δ²e`.
#[derive(Clone)]
pub struct Frame {
    matrix: Mat2,
    det: Expr,
    inverse: Mat2,
    identity: bool,
    cache: Arc<Mutex<DeltaCache>>,
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({:?})", self.matrix)
    }
}

impl Serialize for Frame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl Default for Frame {
    fn default() -> Self {
        Frame::identity()
    }
}

impl Frame {
    pub fn identity() -> Frame {
        Frame::unchecked(Mat2::identity(), Expr::one())
    }

    /// Frame with matrix `E`; fails when `det E` vanishes.
    pub fn new(matrix: Mat2, o: &EqOracle) -> Result<Frame> {
        let det = matrix.det();
        if det.is_zero_literal() || eq_zero(&det, o)? {
            return Err(Error::SingularFrame);
        }
        Ok(Frame::unchecked(matrix, det))
    }

    fn unchecked(matrix: Mat2, det: Expr) -> Frame {
        let identity = matrix.entries().iter().zip([1, 0, 0, 1]).all(|(e, v)| {
            e.as_const().is_some_and(|c| *c == crate::expr::Rat::from_integer(v.into()))
        });
        let inverse = if identity { Mat2::identity() } else { matrix.inverse_with_det(&det) };
        Frame { matrix, det, inverse, identity, cache: Arc::default() }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn det(&self) -> &Expr {
        &self.det
    }

    /// `E⁻¹`.
    pub fn inverse(&self) -> &Mat2 {
        &self.inverse
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `δⁱe = Σ_k (E⁻¹)_{ik} ∂ᵏe` for `i ∈ {0, 1}`.
    pub fn delta(&self, i: usize, e: &Expr) -> Expr {
        assert!(i < 2, "frame direction {i} out of range");
        if self.identity {
            return diff(e, Var::from_index(i));
        }
        if e.as_const().is_some() {
            return Expr::zero();
        }
        let key = (e.id(), i);
        if let Some((_, d)) = self.cache.lock().unwrap().get(&key) {
            return d.clone();
        }
        let row = self.inverse.row(i);
        let d = &row[0] * diff(e, Var::X) + &row[1] * diff(e, Var::Y);
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, (e.clone(), d.clone()));
        d
    }

    /// `(δ¹e, δ²e)`.
    pub fn grad(&self, e: &Expr) -> Vec2 {
        [self.delta(0, e), self.delta(1, e)]
    }

    /// `δⁱ` applied to every entry of `m`.
    pub fn delta_mat(&self, i: usize, m: &Mat2) -> Mat2 {
        m.map(|e| self.delta(i, e))
    }

    /// Jacobian of the maps `(ξ, η)` in this frame: `[[δ¹ξ, δ¹η], [δ²ξ, δ²η]]`.
    /// Relative to this frame it is always admissible.
    pub fn jacobian(&self, xi: &Expr, eta: &Expr) -> Mat2 {
        Mat2::new(self.delta(0, xi), self.delta(0, eta), self.delta(1, xi), self.delta(1, eta))
    }

    /// Frame with matrix `E·g`, so that `δ' = g⁻¹δ`.
    pub fn compose(&self, g: &Mat2, o: &EqOracle) -> Result<Frame> {
        let product = self.matrix.mul(g);
        let det = &self.det * g.det();
        if det.is_zero_literal() || eq_zero(&det, o)? {
            return Err(Error::SingularFrame);
        }
        Ok(Frame::unchecked(product, det))
    }

    /// Componentwise identity of the frame matrices.
    pub fn equiv(&self, other: &Frame, o: &EqOracle) -> Result<bool> {
        Ok(self.matrix.equiv(&other.matrix, o)?)
    }
}

/// `δⁱe` with the one-based direction `i ∈ {1, 2}`.
pub fn delta_apply(fr: &Frame, i: usize, e: &Expr) -> Result<Expr> {
    match i {
        1 | 2 => Ok(fr.delta(i - 1, e)),
        _ => Err(Error::Precondition(format!("frame direction must be 1 or 2, got {i}"))),
    }
}

/// `compose(fr, g)`; see [`Frame::compose`].
pub fn compose(fr: &Frame, g: &Mat2, o: &EqOracle) -> Result<Frame> {
    fr.compose(g, o)
}

/// Jacobian `g` of `(ξ, η)` with `g¹₁ = ξx`, `g¹₂ = ηx`, `g²₁ = ξy`,
/// `g²₂ = ηy`, and its determinant `Δ`.
///
/// ```
/// use lpde::expr::{ex, EqOracle, Mat2};
/// use lpde::frame::jacobian_from_maps;
/// let o = EqOracle::default();
/// let (g, delta) = jacobian_from_maps(&ex("x + y^2"), &ex("y"), &o).unwrap();
/// assert!(g.equiv(&Mat2::new(ex("1"), ex("0"), ex("2*y"), ex("1")), &o).unwrap());
/// assert!(delta.is_one_literal());
/// ```
pub fn jacobian_from_maps(xi: &Expr, eta: &Expr, o: &EqOracle) -> Result<(Mat2, Expr)> {
    let g = Frame::identity().jacobian(xi, eta);
    let delta = g.det();
    if delta.is_zero_literal() || eq_zero(&delta, o)? {
        return Err(Error::DegenerateMap);
    }
    Ok((g, delta))
}

/// The two admissibility tests for a matrix relative to a base frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    /// `δ¹g²_j ≡ δ²g¹_j` for both columns.
    pub symbolic: bool,
    /// The operators of the composed frame commute on every probe function.
    pub commutation: bool,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.symbolic && self.commutation
    }
}

/// Probe functions for the commutation test.
pub const PROBES: [&str; 4] = ["x^2", "x*y", "y^2", "x^3*y"];

/// Checks whether `g` is admissible relative to `base`.
///
/// ```
/// use lpde::expr::{ex, EqOracle, Mat2};
/// use lpde::frame::{is_admissible, Frame};
/// let o = EqOracle::default();
/// let g = Mat2::diag(ex("1"), ex("x"));
/// let report = is_admissible(&g, &Frame::identity(), &o).unwrap();
/// assert!(!report.symbolic && !report.commutation);
/// ```
pub fn is_admissible(g: &Mat2, base: &Frame, o: &EqOracle) -> Result<AdmissibilityReport> {
    let det = g.det();
    if det.is_zero_literal() || eq_zero(&det, o)? {
        return Err(Error::SingularMatrix);
    }
    let symbolic_residuals: Vec<Expr> =
        (0..2).map(|j| base.delta(0, g.get(1, j)) - base.delta(1, g.get(0, j))).collect();
    let symbolic = o.all_zero(&symbolic_residuals)?;
    let composed = base.compose(g, o)?;
    let commutators: Vec<Expr> = PROBES
        .iter()
        .map(|p| {
            let f = crate::expr::ex(p);
            let d12 = composed.delta(0, &composed.delta(1, &f));
            let d21 = composed.delta(1, &composed.delta(0, &f));
            d12 - d21
        })
        .collect();
    let commutation = o.all_zero(&commutators)?;
    Ok(AdmissibilityReport { symbolic, commutation })
}
