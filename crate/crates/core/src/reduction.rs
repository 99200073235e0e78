//! Reducibility to constant coefficients without constructing `P`.
//!
//! With `c^∂ ≡ 0` and `γ0 ≢ 0` the transformation `(h, g)` reaching a
//! constant-coefficient equation has `h⁻¹δh = −γ0⁻¹δγ0`, and `g` must make
//! `gᵗMg` and `g⁻¹m` constant. Written in `Nᵢ = δⁱg·g⁻¹` this is
//!
//! ```text
//! NᵢᵗM + MNᵢ + δⁱM = 0,    Nᵢm = δⁱm,    i = 1, 2
//! ```
//!
//! The first equations determine `N1, N2` linearly. A matrix `g` with those
//! logarithmic derivatives exists exactly when
//! `δ¹N2 + N2N1 = δ²N1 + N1N2` and the first row of `N2` equals the second
//! row of `N1`. The realizing `g` itself is never built.

use serde::Serialize;

use crate::equation::Lpde;
use crate::error::{Error, Result};
use crate::expr::{eq_zero, solve_linear, EqOracle, Expr, Mat2, Vec2};
use crate::frame::Frame;
use crate::invariants::InvariantContext;
use crate::transform::Transformation;

/// Which reduction system applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// `γ0 ≢ 0`: the system is linear in `N1, N2`.
    Gamma0Nonzero,
    /// `γ0 ≡ 0`: only a supplied candidate can be checked.
    Gamma0Zero,
}

/// The symmetric form `M` and the vector `m` of the reduction system.
///
/// For [`Variant::Gamma0Zero`], `vector` omits the `Δ⁻¹δΔ` term, which
/// depends on the candidate matrix.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionData {
    pub form: Mat2,
    pub vector: Vec2,
    pub variant: Variant,
}

/// `N1 = δ¹g·g⁻¹` and `N2 = δ²g·g⁻¹`.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionPair {
    pub n1: Mat2,
    pub n2: Mat2,
}

fn context(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<InvariantContext> {
    let ctx = InvariantContext::new(v, fr, o)?;
    if !eq_zero(ctx.d0(), o)? {
        return Err(Error::NecessaryCondition("D0 != 0, so c^d does not vanish".into()));
    }
    Ok(ctx)
}

/// `M` and `m` for `v` in `fr`.
///
/// ```
/// use lpde::equation::Lpde;
/// use lpde::expr::{ex, EqOracle, Mat2};
/// use lpde::frame::Frame;
/// use lpde::reduction::assemble_reduction_data;
/// let o = EqOracle::default();
/// let rd = assemble_reduction_data(&Lpde::parse(["1", "0", "-1", "0", "0", "1"]), &Frame::identity(), &o).unwrap();
/// assert!(rd.form.equiv(&Mat2::diag(ex("1"), ex("-1")), &o).unwrap());
/// ```
pub fn assemble_reduction_data(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<ReductionData> {
    let ctx = context(v, fr, o)?;
    if ctx.gamma0_zero()? {
        let d = ctx.d();
        let half_log_d = fr.grad(d).map(|e| e / (Expr::int(2) * d));
        let [p, q] = ctx.ab_over_d();
        let [r, s] = half_log_d;
        return Ok(ReductionData { form: ctx.principal(), vector: [p + r, q + s], variant: Variant::Gamma0Zero });
    }
    let form = ctx.principal().scale(&ctx.gamma0().recip());
    Ok(ReductionData { form, vector: ctx.alpha0_beta0()?, variant: Variant::Gamma0Nonzero })
}

/// Unknown slots `[n11, n12, n21, n22, p21, p22]`; `N2`'s first row is
/// `N1`'s second row.
const N1_SLOTS: [[usize; 2]; 2] = [[0, 1], [2, 3]];
const N2_SLOTS: [[usize; 2]; 2] = [[2, 3], [4, 5]];
const UPPER: [(usize, usize); 3] = [(0, 0), (0, 1), (1, 1)];

fn pair_from(u: &[Expr]) -> ConnectionPair {
    let fill = |slots: [[usize; 2]; 2]| {
        Mat2::new(u[slots[0][0]].clone(), u[slots[0][1]].clone(), u[slots[1][0]].clone(), u[slots[1][1]].clone())
    };
    ConnectionPair { n1: fill(N1_SLOTS), n2: fill(N2_SLOTS) }
}

/// `NᵗM + MN + δⁱM` for each direction.
pub fn connection_residuals(rd: &ReductionData, cp: &ConnectionPair, fr: &Frame) -> [Mat2; 2] {
    let m = &rd.form;
    [(0, &cp.n1), (1, &cp.n2)].map(|(i, n)| n.transpose().mul(m).add(&m.mul(n)).add(&fr.delta_mat(i, m)))
}

/// Solves the linear system for `N1, N2`.
pub fn solve_connection(rd: &ReductionData, fr: &Frame, o: &EqOracle) -> Result<ConnectionPair> {
    if rd.variant != Variant::Gamma0Nonzero {
        return Err(Error::Precondition("the linear system needs gamma0 != 0".into()));
    }
    let m = &rd.form;
    let mut rows = Vec::with_capacity(6);
    let mut rhs = Vec::with_capacity(6);
    for (i, slots) in [N1_SLOTS, N2_SLOTS].into_iter().enumerate() {
        let dm = fr.delta_mat(i, m);
        for (j, k) in UPPER {
            let mut row: Vec<Vec<Expr>> = vec![Vec::new(); 6];
            for l in 0..2 {
                row[slots[l][j]].push(m.get(l, k).clone());
                row[slots[l][k]].push(m.get(j, l).clone());
            }
            rows.push(row.into_iter().map(Expr::sum).collect());
            rhs.push(-dm.get(j, k).clone());
        }
    }
    let solution = solve_linear(&rows, &rhs, o)?;
    let cp = pair_from(&solution);
    let residuals: Vec<Expr> = connection_residuals(rd, &cp, fr).iter().flat_map(|r| r.entries()).collect();
    if !o.all_zero(&residuals)? {
        return Err(Error::Precondition("connection residual does not vanish".into()));
    }
    Ok(cp)
}

/// `δ¹N2 + N2N1 ≡ δ²N1 + N1N2` and `N2` row 1 ≡ `N1` row 2.
///
/// ```
/// use lpde::expr::{ex, EqOracle, Mat2};
/// use lpde::frame::Frame;
/// use lpde::reduction::{integrability_check, ConnectionPair};
/// let o = EqOracle::default();
/// let cp = ConnectionPair { n1: Mat2::zero(), n2: Mat2::diag(ex("y"), ex("0")) };
/// assert!(!integrability_check(&cp, &Frame::identity(), &o).unwrap());
/// ```
pub fn integrability_check(cp: &ConnectionPair, fr: &Frame, o: &EqOracle) -> Result<bool> {
    let ConnectionPair { n1, n2 } = cp;
    let flat = fr.delta_mat(0, n2).add(&n2.mul(n1)).sub(&fr.delta_mat(1, n1)).sub(&n1.mul(n2));
    let [a, b] = n2.row(0);
    let [c, d] = n1.row(1);
    let mut all: Vec<Expr> = flat.entries().to_vec();
    all.push(a - c);
    all.push(b - d);
    Ok(o.all_zero(&all)?)
}

/// `Nᵢm − δⁱm` for `i = 1, 2`.
fn transport_residuals(cp: &ConnectionPair, m: &Vec2, fr: &Frame) -> [Vec2; 2] {
    [(0, &cp.n1), (1, &cp.n2)].map(|(i, n)| {
        let [a, b] = n.mul_vec(m);
        [a - fr.delta(i, &m[0]), b - fr.delta(i, &m[1])]
    })
}

/// Pass/fail of each group of conditions.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub reducible: bool,
    pub data: ReductionData,
    pub connection: ConnectionPair,
    /// `NᵢᵗM + MNᵢ + δⁱM ≡ 0` after substitution.
    pub residual: bool,
    pub integrable: bool,
    /// `N1·m ≡ δ¹m`.
    pub transport1: bool,
    /// `N2·m ≡ δ²m`.
    pub transport2: bool,
}

/// Decides reducibility for `γ0 ≢ 0` and reports every condition group.
pub fn reduction_report(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<ReductionReport> {
    let data = assemble_reduction_data(v, fr, o)?;
    let connection = solve_connection(&data, fr, o)?;
    let residuals: Vec<Expr> = connection_residuals(&data, &connection, fr).iter().flat_map(|r| r.entries()).collect();
    let residual = o.all_zero(&residuals)?;
    let integrable = integrability_check(&connection, fr, o)?;
    let [t1, t2] = transport_residuals(&connection, &data.vector, fr);
    let transport1 = o.all_zero(&t1)?;
    let transport2 = o.all_zero(&t2)?;
    let reducible = residual && integrable && transport1 && transport2;
    Ok(ReductionReport { reducible, data, connection, residual, integrable, transport1, transport2 })
}

/// Whether `v` is equivalent to an equation with constant coefficients,
/// decided through the connection `N1, N2`. Requires `γ0 ≢ 0`.
pub fn constant_reducible_by_connection(v: &Lpde, fr: &Frame, o: &EqOracle) -> Result<bool> {
    Ok(reduction_report(v, fr, o)?.reducible)
}

/// For `γ0 ≡ 0`, checks whether the matrix of `t` satisfies the reduction
/// system. The gauge of `t` is ignored; it is fixed by `g`.
///
/// ```
/// use lpde::equation::Lpde;
/// use lpde::expr::{ex, EqOracle, Mat2};
/// use lpde::frame::Frame;
/// use lpde::reduction::check_reduction_candidate;
/// use lpde::transform::Transformation;
/// let o = EqOracle::default();
/// let v = Lpde::parse(["1", "0", "-1", "0", "0", "0"]);
/// let skew = Transformation::from_matrix(ex("1"), Mat2::diag(ex("1"), ex("x")), &o).unwrap();
/// assert!(!check_reduction_candidate(&v, &Frame::identity(), &skew, &o).unwrap());
/// ```
pub fn check_reduction_candidate(v: &Lpde, fr: &Frame, t: &Transformation, o: &EqOracle) -> Result<bool> {
    let ctx = context(v, fr, o).map_err(|e| match e {
        Error::NecessaryCondition(s) => Error::Precondition(s),
        e => e,
    })?;
    if !ctx.gamma0_zero()? {
        return Err(Error::Precondition("gamma0 != 0; use the connection test".into()));
    }
    let data = assemble_reduction_data(v, fr, o)?;
    let g = t.g();
    let ginv = g.inverse_with_det(t.delta());
    let cp = ConnectionPair { n1: fr.delta_mat(0, g).mul(&ginv), n2: fr.delta_mat(1, g).mul(&ginv) };
    let d = ctx.d();
    let log_delta = fr.grad(t.delta()).map(|e| e / t.delta());
    let log_scale: Vec2 = [0, 1].map(|i| &log_delta[i] + fr.delta(i, d) / (Expr::int(2) * d));
    let m = [&data.vector[0] + &log_delta[0], &data.vector[1] + &log_delta[1]];
    let mut all = Vec::new();
    for (i, r) in connection_residuals(&data, &cp, fr).iter().enumerate() {
        all.extend(r.sub(&data.form.scale(&log_scale[i])).entries());
    }
    for r in transport_residuals(&cp, &m, fr) {
        all.extend(r);
    }
    Ok(o.all_zero(&all)?)
}
