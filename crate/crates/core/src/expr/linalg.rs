use std::fmt;

use serde::{Serialize, Serializer};

use super::{eq_zero, EqOracle, Expr, ExprError};

/// Column or row vector of length two.
pub type Vec2 = [Expr; 2];

/// 2×2 matrix of expressions, indexed `m[row][col]` from zero.
#[derive(Clone, PartialEq)]
pub struct Mat2(pub [[Expr; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1])
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.0.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl Mat2 {
    pub fn new(a11: Expr, a12: Expr, a21: Expr, a22: Expr) -> Mat2 {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn identity() -> Mat2 {
        Mat2::diag(Expr::one(), Expr::one())
    }

    pub fn zero() -> Mat2 {
        Mat2::diag(Expr::zero(), Expr::zero())
    }

    pub fn diag(a: Expr, b: Expr) -> Mat2 {
        Mat2::new(a, Expr::zero(), Expr::zero(), b)
    }

    pub fn from_columns(c1: Vec2, c2: Vec2) -> Mat2 {
        let [a11, a21] = c1;
        let [a12, a22] = c2;
        Mat2::new(a11, a12, a21, a22)
    }

    pub fn from_rows(r1: Vec2, r2: Vec2) -> Mat2 {
        Mat2([r1, r2])
    }

    pub fn get(&self, row: usize, col: usize) -> &Expr {
        &self.0[row][col]
    }

    pub fn row(&self, i: usize) -> Vec2 {
        self.0[i].clone()
    }

    pub fn column(&self, j: usize) -> Vec2 {
        [self.0[0][j].clone(), self.0[1][j].clone()]
    }

    pub fn entries(&self) -> [Expr; 4] {
        let [[a, b], [c, d]] = self.0.clone();
        [a, b, c, d]
    }

    pub fn det(&self) -> Expr {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0].clone(), m[1][0].clone(), m[0][1].clone(), m[1][1].clone())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Mat2 {
        let m = &self.0;
        Mat2::new(f(&m[0][0]), f(&m[0][1]), f(&m[1][0]), f(&m[1][1]))
    }

    pub fn scale(&self, s: &Expr) -> Mat2 {
        self.map(|e| s * e)
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &other.0);
        Mat2::new(&a[0][0] + &b[0][0], &a[0][1] + &b[0][1], &a[1][0] + &b[1][0], &a[1][1] + &b[1][1])
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &other.0);
        Mat2::new(&a[0][0] - &b[0][0], &a[0][1] - &b[0][1], &a[1][0] - &b[1][0], &a[1][1] - &b[1][1])
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &other.0);
        let cell = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Mat2::new(cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1))
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        let a = &self.0;
        [&a[0][0] * &v[0] + &a[0][1] * &v[1], &a[1][0] * &v[0] + &a[1][1] * &v[1]]
    }

    /// Row vector times matrix: `vᵗ·M`.
    pub fn vec_mul(&self, v: &Vec2) -> Vec2 {
        self.transpose().mul_vec(v)
    }

    /// The quadratic form `vᵗ·M·v`.
    pub fn quadratic(&self, v: &Vec2) -> Expr {
        let w = self.mul_vec(v);
        &v[0] * &w[0] + &v[1] * &w[1]
    }

    /// Adjugate divided by `det`, without testing `det`.
    pub fn inverse_with_det(&self, det: &Expr) -> Mat2 {
        let m = &self.0;
        Mat2::new(
            &m[1][1] / det,
            -(&m[0][1] / det),
            -(&m[1][0] / det),
            &m[0][0] / det,
        )
    }

    /// Componentwise identity test.
    pub fn equiv(&self, other: &Mat2, o: &EqOracle) -> Result<bool, ExprError> {
        let diffs: Vec<Expr> = self.entries().into_iter().zip(other.entries()).map(|(a, b)| a - b).collect();
        o.all_zero(&diffs)
    }

    pub fn is_zero(&self, o: &EqOracle) -> Result<bool, ExprError> {
        o.all_zero(&self.entries())
    }
}

/// Inverse via the adjugate.
///
/// ```
/// use lpde::expr::{ex, inv2, EqOracle, Mat2};
/// let o = EqOracle::default();
/// let m = Mat2::new(ex("1"), ex("0"), ex("2*y"), ex("1"));
/// let expected = Mat2::new(ex("1"), ex("0"), ex("-2*y"), ex("1"));
/// assert!(inv2(&m, &o).unwrap().equiv(&expected, &o).unwrap());
/// ```
pub fn inv2(m: &Mat2, o: &EqOracle) -> Result<Mat2, ExprError> {
    let det = m.det();
    if det.is_zero_literal() || eq_zero(&det, o)? {
        return Err(ExprError::SingularMatrix);
    }
    Ok(m.inverse_with_det(&det))
}

/// Gaussian elimination over the expression field. The pivot of each column
/// is the first remaining row whose entry is not identically zero.
pub fn solve_linear(a: &[Vec<Expr>], b: &[Expr], o: &EqOracle) -> Result<Vec<Expr>, ExprError> {
    let n = b.len();
    assert!(n >= 1, "empty system");
    assert!(a.len() == n && a.iter().all(|r| r.len() == n), "system must be square");
    let mut rows: Vec<Vec<Expr>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    for col in 0..n {
        let mut pivot = None;
        for (r, row) in rows.iter().enumerate().skip(col) {
            let entry = &row[col];
            if !entry.is_zero_literal() && !eq_zero(entry, o)? {
                pivot = Some(r);
                break;
            }
        }
        let p = pivot.ok_or(ExprError::SingularSystem { column: col })?;
        rows.swap(col, p);
        let pivot_row = rows[col].clone();
        for row in rows.iter_mut().skip(col + 1) {
            if row[col].is_zero_literal() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            row[col] = Expr::zero();
            for j in col + 1..=n {
                if !pivot_row[j].is_zero_literal() {
                    row[j] = &row[j] - &factor * &pivot_row[j];
                }
            }
        }
    }
    let mut solution = vec![Expr::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rows[i][n].clone();
        for j in i + 1..n {
            if !rows[i][j].is_zero_literal() {
                acc = acc - &rows[i][j] * &solution[j];
            }
        }
        solution[i] = acc / &rows[i][i];
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eq_expr, ex};

    fn o() -> EqOracle {
        EqOracle::default()
    }

    #[test]
    fn identity_system() {
        let a = vec![vec![ex("1"), ex("0")], vec![ex("0"), ex("1")]];
        let v = solve_linear(&a, &[ex("x"), ex("y")], &o()).unwrap();
        assert_eq!(v, vec![ex("x"), ex("y")]);
    }

    #[test]
    fn diagonal_system() {
        let a = vec![vec![ex("y"), ex("0")], vec![ex("0"), ex("1")]];
        let v = solve_linear(&a, &[ex("x"), ex("0")], &o()).unwrap();
        assert!(eq_expr(&v[0], &ex("x/y"), &o()).unwrap());
        assert!(v[1].is_zero_literal());
    }

    #[test]
    fn singular_system() {
        let a = vec![vec![ex("1"), ex("1")], vec![ex("1"), ex("1")]];
        assert_eq!(solve_linear(&a, &[ex("0"), ex("1")], &o()), Err(ExprError::SingularSystem { column: 1 }));
    }

    #[test]
    fn pivoting_skips_hidden_zeros() {
        let a = vec![vec![ex("x - x"), ex("1")], vec![ex("y"), ex("1")]];
        let v = solve_linear(&a, &[ex("2"), ex("3")], &o()).unwrap();
        assert!(eq_expr(&v[0], &ex("1/y"), &o()).unwrap());
        assert!(eq_expr(&v[1], &ex("2"), &o()).unwrap());
    }

    #[test]
    fn inverses() {
        assert!(inv2(&Mat2::identity(), &o()).unwrap().equiv(&Mat2::identity(), &o()).unwrap());
        assert_eq!(inv2(&Mat2::zero(), &o()), Err(ExprError::SingularMatrix));
        let m = Mat2::new(ex("x"), ex("y"), ex("1"), ex("x+y"));
        let prod = m.mul(&inv2(&m, &o()).unwrap());
        assert!(prod.equiv(&Mat2::identity(), &o()).unwrap());
    }

    #[test]
    fn quadratic_form() {
        let m = Mat2::diag(ex("1"), ex("-1"));
        let q = m.quadratic(&[ex("-y"), ex("0")]);
        assert!(eq_expr(&q, &ex("y^2"), &o()).unwrap());
    }
}
