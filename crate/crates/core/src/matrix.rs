//! Dense row-major matrix kernel.
//!
//! Everything the update algorithms need lives here: products, transposes,
//! Cholesky factorization, SPD and LU solves, and norms. Values are
//! immutable once published; every operation returns a fresh matrix.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("dimension mismatch: {op} on {lhs_rows}x{lhs_cols} and {rhs_rows}x{rhs_cols}")]
    ShapeMismatch {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },
    #[error("index out of range: {what} {index} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("matrix is not positive definite (pivot {pivot:.3e} at column {column})")]
    NotPositiveDefinite { pivot: f64, column: usize },
    #[error("matrix is singular (zero pivot at column {column})")]
    Singular { column: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("empty matrix: rows and cols must both be nonzero")]
    Empty,
}

/// Thresholds governing "this vector is zero" decisions and residual
/// acceptance.
///
/// `zero_sq` is compared against the squared Euclidean norm of a candidate
/// residual column; the default 1e-10 is the literal threshold of the
/// update recursion. With `relative` set, the threshold is scaled by the
/// squared norm of the source column instead of being applied raw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub zero_sq: f64,
    pub residual_rel: f64,
    pub relative: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            zero_sq: 1e-10,
            residual_rel: 1e-8,
            relative: false,
        }
    }
}

impl Tolerance {
    pub fn with_eps(zero_sq: f64) -> Self {
        Tolerance {
            zero_sq,
            ..Default::default()
        }
    }

    /// True when a residual with squared norm `c_sq` counts as zero,
    /// given the squared norm `ref_sq` of the column it came from.
    pub fn is_zero(&self, c_sq: f64, ref_sq: f64) -> bool {
        if self.relative {
            c_sq <= self.zero_sq * ref_sq
        } else {
            c_sq < self.zero_sq
        }
    }

    /// An absolute-mode tolerance with the threshold already resolved for a
    /// column of squared norm `ref_sq`. Lets the relative CLI flag reuse
    /// code paths that test against `zero_sq` directly.
    pub fn resolved_for(&self, ref_sq: f64) -> Tolerance {
        if self.relative {
            Tolerance {
                // f64::MIN_POSITIVE keeps an exactly-zero source column
                // classified as zero (c_sq = 0 < threshold).
                zero_sq: (self.zero_sq * ref_sq).max(f64::MIN_POSITIVE),
                residual_rel: self.residual_rel,
                relative: false,
            }
        } else {
            *self
        }
    }
}

/// Dense row-major matrix of f64. `data.len() == rows * cols` always.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: &[f64]) -> Result<Matrix, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != rows * cols {
            return Err(MatrixError::ShapeMismatch {
                op: "from_rows",
                lhs_rows: rows,
                lhs_cols: cols,
                rhs_rows: data.len(),
                rhs_cols: 1,
            });
        }
        for (idx, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(MatrixError::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Matrix {
            rows,
            cols,
            data: data.to_vec(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Column vector from a slice.
    pub fn col_vec(data: &[f64]) -> Result<Matrix, MatrixError> {
        Matrix::from_rows(data.len(), 1, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::ShapeMismatch {
                op: "matmul",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        // ikj order keeps the inner loop streaming over contiguous rows.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += aik * b;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    fn zip_with(
        &self,
        rhs: &Matrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Matrix, MatrixError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(MatrixError::ShapeMismatch {
                op,
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn col_sq_norm(&self, j: usize) -> Result<f64, MatrixError> {
        if j >= self.cols {
            return Err(MatrixError::IndexOutOfRange {
                what: "column",
                index: j,
                limit: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, j).powi(2)).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise |a - b|; shapes must match.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> Result<f64, MatrixError> {
        Ok(self.sub(rhs)?.max_abs())
    }

    /// Column `j` as an m-by-1 matrix.
    pub fn col(&self, j: usize) -> Result<Matrix, MatrixError> {
        self.col_range(j, j + 1)
    }

    /// Columns `[lo, hi)` as an m-by-(hi-lo) matrix.
    pub fn col_range(&self, lo: usize, hi: usize) -> Result<Matrix, MatrixError> {
        if hi > self.cols || lo > hi {
            return Err(MatrixError::IndexOutOfRange {
                what: "column range end",
                index: hi,
                limit: self.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, hi - lo);
        for i in 0..self.rows {
            for (jj, j) in (lo..hi).enumerate() {
                out.data[i * out.cols + jj] = self.get(i, j);
            }
        }
        Ok(out)
    }

    /// Rows `[lo, hi)`.
    pub fn row_range(&self, lo: usize, hi: usize) -> Result<Matrix, MatrixError> {
        if hi > self.rows || lo > hi {
            return Err(MatrixError::IndexOutOfRange {
                what: "row range end",
                index: hi,
                limit: self.rows,
            });
        }
        Ok(Matrix {
            rows: hi - lo,
            cols: self.cols,
            data: self.data[lo * self.cols..hi * self.cols].to_vec(),
        })
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        if self.rows != rhs.rows {
            return Err(MatrixError::ShapeMismatch {
                op: "hstack",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let cols = self.cols + rhs.cols;
        let mut out = Matrix::zeros(self.rows, cols);
        for i in 0..self.rows {
            out.data[i * cols..i * cols + self.cols]
                .copy_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            out.data[i * cols + self.cols..(i + 1) * cols]
                .copy_from_slice(&rhs.data[i * rhs.cols..(i + 1) * rhs.cols]);
        }
        Ok(out)
    }

    /// `[self; rhs]` (rhs stacked below).
    pub fn vstack(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != rhs.cols {
            return Err(MatrixError::ShapeMismatch {
                op: "vstack",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(Matrix {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    /// Lower-triangular Cholesky factor of an SPD matrix.
    ///
    /// The input is symmetrized as (S + S^T)/2 before factoring; products
    /// like C^T C are symmetric only to rounding. A pivot at or below
    /// `1e-12 * max(1, max diagonal)` reports `NotPositiveDefinite` -- the
    /// caller may use that failure as a rank signal rather than an error.
    pub fn cholesky(&self) -> Result<Matrix, MatrixError> {
        let n = self.rows;
        if self.cols != n {
            return Err(MatrixError::ShapeMismatch {
                op: "cholesky",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: n,
                rhs_cols: n,
            });
        }
        let max_diag = (0..n).fold(0.0f64, |m, i| m.max(self.get(i, i).abs()));
        let pivot_tol = 1e-12 * max_diag.max(1.0);

        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                let sym = 0.5 * (self.get(i, j) + self.get(j, i));
                let mut sum = sym;
                for k in 0..j {
                    sum -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if sum <= pivot_tol {
                        return Err(MatrixError::NotPositiveDefinite {
                            pivot: sum,
                            column: j,
                        });
                    }
                    l.set(j, j, sum.sqrt());
                } else {
                    l.set(i, j, sum / l.get(j, j));
                }
            }
        }
        Ok(l)
    }

    /// Solve `L X = rhs` with `L` lower-triangular.
    pub fn solve_lower_tri(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        let n = self.rows;
        if self.cols != n || rhs.rows != n {
            return Err(MatrixError::ShapeMismatch {
                op: "solve_lower_tri",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut x = rhs.clone();
        for c in 0..x.cols {
            for i in 0..n {
                let mut sum = x.get(i, c);
                for k in 0..i {
                    sum -= self.get(i, k) * x.get(k, c);
                }
                let d = self.get(i, i);
                if d == 0.0 {
                    return Err(MatrixError::Singular { column: i });
                }
                x.set(i, c, sum / d);
            }
        }
        Ok(x)
    }

    /// Solve `L^T X = rhs` with `L` lower-triangular (so `L^T` is upper).
    pub fn solve_lower_tri_transposed(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        let n = self.rows;
        if self.cols != n || rhs.rows != n {
            return Err(MatrixError::ShapeMismatch {
                op: "solve_lower_tri_transposed",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut x = rhs.clone();
        for c in 0..x.cols {
            for i in (0..n).rev() {
                let mut sum = x.get(i, c);
                for k in i + 1..n {
                    sum -= self.get(k, i) * x.get(k, c);
                }
                let d = self.get(i, i);
                if d == 0.0 {
                    return Err(MatrixError::Singular { column: i });
                }
                x.set(i, c, sum / d);
            }
        }
        Ok(x)
    }

    /// Solve `S X = rhs` for SPD `S` via Cholesky and two triangular solves.
    pub fn solve_spd(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        let l = self.cholesky()?;
        let y = l.solve_lower_tri(rhs)?;
        l.solve_lower_tri_transposed(&y)
    }

    /// Solve `A X = rhs` for general square `A` via partially pivoted LU.
    ///
    /// The dispatch case that inverts `I + H D~` needs this: that matrix is
    /// square but not symmetric.
    pub fn solve_lu(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        let n = self.rows;
        if self.cols != n || rhs.rows != n {
            return Err(MatrixError::ShapeMismatch {
                op: "solve_lu",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut lu = self.clone();
        let mut x = rhs.clone();
        for j in 0..n {
            let mut piv = j;
            for i in j + 1..n {
                if lu.get(i, j).abs() > lu.get(piv, j).abs() {
                    piv = i;
                }
            }
            if lu.get(piv, j) == 0.0 {
                return Err(MatrixError::Singular { column: j });
            }
            if piv != j {
                for c in 0..n {
                    let t = lu.get(j, c);
                    lu.set(j, c, lu.get(piv, c));
                    lu.set(piv, c, t);
                }
                for c in 0..x.cols {
                    let t = x.get(j, c);
                    x.set(j, c, x.get(piv, c));
                    x.set(piv, c, t);
                }
            }
            let d = lu.get(j, j);
            for i in j + 1..n {
                let f = lu.get(i, j) / d;
                lu.set(i, j, f);
                for c in j + 1..n {
                    let v = lu.get(i, c) - f * lu.get(j, c);
                    lu.set(i, c, v);
                }
                for c in 0..x.cols {
                    let v = x.get(i, c) - f * x.get(j, c);
                    x.set(i, c, v);
                }
            }
        }
        // Back substitution on U.
        for c in 0..x.cols {
            for i in (0..n).rev() {
                let mut sum = x.get(i, c);
                for k in i + 1..n {
                    sum -= lu.get(i, k) * x.get(k, c);
                }
                x.set(i, c, sum / lu.get(i, i));
            }
        }
        Ok(x)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:.6}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, d: &[f64]) -> Matrix {
        Matrix::from_rows(rows, cols, d).unwrap()
    }

    // Independent scalar-loop product used as the oracle for matmul.
    fn matmul_naive(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = 0.0;
                for k in 0..a.cols() {
                    s += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    #[test]
    fn matmul_identity() {
        let i2 = Matrix::identity(2);
        assert_eq!(i2.matmul(&i2).unwrap(), i2);
    }

    #[test]
    fn matmul_zero() {
        let a = m(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let z = Matrix::zeros(2, 1);
        assert_eq!(a.matmul(&z).unwrap(), z);
    }

    #[test]
    fn matmul_hand_value() {
        let a = m(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = m(2, 1, &[5.0, 6.0]);
        let got = a.matmul(&b).unwrap();
        assert_eq!(got, m(2, 1, &[17.0, 39.0]));
        assert_eq!(got, matmul_naive(&a, &b));
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        let err = a.matmul(&b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2x3"), "{msg}");
    }

    #[test]
    fn transpose_cases() {
        assert_eq!(Matrix::identity(3).transpose(), Matrix::identity(3));
        let ones = Matrix::from_fn(2, 3, |_, _| 1.0);
        assert_eq!(ones.transpose(), Matrix::from_fn(3, 2, |_, _| 1.0));
        let a = m(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(a.transpose(), m(2, 2, &[1.0, 3.0, 2.0, 4.0]));
    }

    #[test]
    fn cholesky_scalar_and_identity() {
        assert_eq!(m(1, 1, &[4.0]).cholesky().unwrap(), m(1, 1, &[2.0]));
        assert_eq!(Matrix::identity(3).cholesky().unwrap(), Matrix::identity(3));
    }

    #[test]
    fn cholesky_2x2_reconstructs() {
        let s = m(2, 2, &[4.0, 2.0, 2.0, 5.0]);
        let l = s.cholesky().unwrap();
        assert_eq!(l, m(2, 2, &[2.0, 0.0, 1.0, 2.0]));
        let rec = l.matmul(&l.transpose()).unwrap();
        assert!(rec.max_abs_diff(&s).unwrap() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let s = m(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            s.cholesky(),
            Err(MatrixError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn solve_spd_identity_and_diagonal() {
        let b = m(2, 1, &[3.0, 7.0]);
        assert!(Matrix::identity(2)
            .solve_spd(&b)
            .unwrap()
            .max_abs_diff(&b)
            .unwrap()
            .abs()
            < 1e-15);
        let d = m(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let rhs = m(2, 1, &[2.0, 8.0]);
        let x = d.solve_spd(&rhs).unwrap();
        assert!(x.max_abs_diff(&m(2, 1, &[1.0, 2.0])).unwrap() < 1e-15);
    }

    #[test]
    fn solve_spd_residual() {
        let s = m(2, 2, &[4.0, 2.0, 2.0, 5.0]);
        let rhs = m(2, 1, &[8.0, 9.0]);
        let x = s.solve_spd(&rhs).unwrap();
        let r = s.matmul(&x).unwrap().sub(&rhs).unwrap().frob_norm();
        assert!(r <= 1e-12 * (1.0 + rhs.frob_norm()));
    }

    #[test]
    fn solve_lu_nonsymmetric() {
        let a = m(2, 2, &[0.0, 1.0, 2.0, 3.0]); // needs pivoting
        let rhs = m(2, 1, &[5.0, 8.0]);
        let x = a.solve_lu(&rhs).unwrap();
        let r = a.matmul(&x).unwrap().sub(&rhs).unwrap().frob_norm();
        assert!(r < 1e-12);
    }

    #[test]
    fn norms() {
        assert!((Matrix::identity(2).frob_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m(2, 1, &[3.0, 4.0]).col_sq_norm(0).unwrap(), 25.0);
        assert_eq!(Matrix::zeros(2, 3).frob_norm(), 0.0);
        assert!(matches!(
            Matrix::zeros(2, 3).col_sq_norm(3),
            Err(MatrixError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(matches!(
            Matrix::from_rows(2, 2, &[1.0, 2.0, 3.0]),
            Err(MatrixError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            Matrix::from_rows(1, 2, &[1.0, f64::NAN]),
            Err(MatrixError::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            Matrix::from_rows(0, 2, &[]),
            Err(MatrixError::Empty)
        ));
    }

    #[test]
    fn stacking() {
        let a = m(2, 1, &[1.0, 2.0]);
        let b = m(2, 1, &[3.0, 4.0]);
        assert_eq!(a.hstack(&b).unwrap(), m(2, 2, &[1.0, 3.0, 2.0, 4.0]));
        let c = m(1, 2, &[5.0, 6.0]);
        let d = m(1, 2, &[7.0, 8.0]);
        assert_eq!(c.vstack(&d).unwrap(), m(2, 2, &[5.0, 6.0, 7.0, 8.0]));
    }

    #[test]
    fn tolerance_relative_mode() {
        let tol = Tolerance {
            zero_sq: 1e-10,
            residual_rel: 1e-8,
            relative: true,
        };
        // big column, residual small relative to it
        assert!(tol.is_zero(1e-6, 1e6));
        assert!(!tol.is_zero(1e-2, 1e6));
        // exactly-zero source column counts as zero
        let abs = tol.resolved_for(0.0);
        assert!(abs.is_zero(0.0, 0.0));
    }
}
