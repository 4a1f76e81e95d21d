//! Incremental inverse Cholesky factor of CᵀC.
//!
//! Maintains the upper-triangular G with G·Gᵀ = (CᵀC)⁻¹ as columns are
//! appended to C, extending by
//!
//!   c̃ = c − C G Gᵀ Cᵀ c,
//!   η = 1/√(c̃ᵀc̃),
//!   u = −η · G Gᵀ Cᵀ c,
//!   G' = [G u; 0 η],
//!
//! and refusing the extension (a signal, not an error) when c̃ is zero --
//! the new column then lies in the span of the old ones. The residual c̃
//! doubles as the Greville residual of the growing matrix, which is what
//! makes the one-pass block update work without recomputing any
//! pseudoinverse mid-scan.

use crate::matrix::{Matrix, MatrixError, Tolerance};

/// Upper-triangular G with G·Gᵀ = (CᵀC)⁻¹, plus the columns C it
/// summarizes.
#[derive(Debug, Clone)]
pub struct InvCholFactor {
    g: Matrix,
    cols: Matrix,
}

/// Outcome of [`InvCholFactor::extend`].
#[derive(Debug)]
pub enum Extend {
    /// The column was independent; the factor grew by one.
    Extended {
        factor: InvCholFactor,
        c_tilde: Matrix,
    },
    /// The column lies in the span of the current columns. Carries the
    /// offending residual so the caller can branch without recomputing.
    ZeroSignal { c_tilde: Matrix },
}

/// Initialize the 1x1 factor from the first column, or report the
/// zero-column signal.
pub fn init_g1(c1: &Matrix, tol: &Tolerance) -> Result<Option<InvCholFactor>, MatrixError> {
    if c1.cols() != 1 || c1.rows() == 0 {
        return Err(MatrixError::ShapeMismatch {
            op: "init_g1",
            lhs_rows: c1.rows(),
            lhs_cols: c1.cols(),
            rhs_rows: c1.rows(),
            rhs_cols: 1,
        });
    }
    let sq = c1.col_sq_norm(0)?;
    if tol.is_zero(sq, sq) {
        return Ok(None);
    }
    let g = Matrix::from_rows(1, 1, &[1.0 / sq.sqrt()])?;
    Ok(Some(InvCholFactor {
        g,
        cols: c1.clone(),
    }))
}

impl InvCholFactor {
    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn cols(&self) -> &Matrix {
        &self.cols
    }

    pub fn len(&self) -> usize {
        self.g.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// G Gᵀ Cᵀ c evaluated right to left, three matrix-vector products.
    fn projected_coeffs(&self, ck: &Matrix) -> Result<Matrix, MatrixError> {
        let t = self.cols.transpose().matmul(ck)?;
        let t = self.g.transpose().matmul(&t)?;
        self.g.matmul(&t)
    }

    /// Residual of `ck` against the span of the current columns.
    pub fn c_tilde(&self, ck: &Matrix) -> Result<Matrix, MatrixError> {
        if ck.rows() != self.cols.rows() || ck.cols() != 1 {
            return Err(MatrixError::ShapeMismatch {
                op: "c_tilde",
                lhs_rows: self.cols.rows(),
                lhs_cols: self.cols.cols(),
                rhs_rows: ck.rows(),
                rhs_cols: ck.cols(),
            });
        }
        let w = self.projected_coeffs(ck)?;
        ck.sub(&self.cols.matmul(&w)?)
    }

    /// Append a column, growing the factor, or signal that the column is
    /// dependent.
    pub fn extend(&self, ck: &Matrix, tol: &Tolerance) -> Result<Extend, MatrixError> {
        let w = {
            if ck.rows() != self.cols.rows() || ck.cols() != 1 {
                return Err(MatrixError::ShapeMismatch {
                    op: "extend",
                    lhs_rows: self.cols.rows(),
                    lhs_cols: self.cols.cols(),
                    rhs_rows: ck.rows(),
                    rhs_cols: ck.cols(),
                });
            }
            self.projected_coeffs(ck)?
        };
        let c_tilde = ck.sub(&self.cols.matmul(&w)?)?;
        let sq = c_tilde.col_sq_norm(0)?;
        if tol.is_zero(sq, ck.col_sq_norm(0)?) {
            return Ok(Extend::ZeroSignal { c_tilde });
        }
        let eta = 1.0 / sq.sqrt();
        let u = w.scale(-eta);

        let k = self.len();
        let mut g = Matrix::zeros(k + 1, k + 1);
        for i in 0..k {
            for j in 0..k {
                g.set(i, j, self.g.get(i, j));
            }
            g.set(i, k, u.get(i, 0));
        }
        g.set(k, k, eta);

        Ok(Extend::Extended {
            factor: InvCholFactor {
                g,
                cols: self.cols.hstack(ck)?,
            },
            c_tilde,
        })
    }

    /// Bᵀ = G Gᵀ Cᵀ, the pseudoinverse of the (full-column-rank) C.
    pub fn b_from_g(&self) -> Result<Matrix, MatrixError> {
        let t = self.g.transpose().matmul(&self.cols.transpose())?;
        self.g.matmul(&t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greville::mp_residuals;

    fn col(d: &[f64]) -> Matrix {
        Matrix::col_vec(d).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn extend_ok(f: &InvCholFactor, c: &Matrix) -> (InvCholFactor, Matrix) {
        match f.extend(c, &tol()).unwrap() {
            Extend::Extended { factor, c_tilde } => (factor, c_tilde),
            Extend::ZeroSignal { .. } => panic!("unexpected zero signal"),
        }
    }

    #[test]
    fn init_values() {
        let f = init_g1(&col(&[3.0, 4.0]), &tol()).unwrap().unwrap();
        assert!((f.g().get(0, 0) - 0.2).abs() < 1e-15);
        let f = init_g1(&col(&[1.0, 0.0, 0.0]), &tol()).unwrap().unwrap();
        assert_eq!(f.g().get(0, 0), 1.0);
        assert!(init_g1(&col(&[0.0, 0.0]), &tol()).unwrap().is_none());
    }

    #[test]
    fn c_tilde_orthogonal_and_dependent() {
        let f = init_g1(&col(&[1.0, 0.0, 0.0]), &tol()).unwrap().unwrap();
        let e2 = col(&[0.0, 1.0, 0.0]);
        assert!(f.c_tilde(&e2).unwrap().max_abs_diff(&e2).unwrap() < 1e-15);
        let dep = col(&[2.0, 0.0, 0.0]);
        assert!(f.c_tilde(&dep).unwrap().frob_norm() < 1e-15);
    }

    #[test]
    fn c_tilde_matches_least_squares_residual() {
        // Projecting e1 onto span{(1,1,0)}: residual (0.5, -0.5, 0).
        let f = init_g1(&col(&[1.0, 1.0, 0.0]), &tol()).unwrap().unwrap();
        let r = f.c_tilde(&col(&[1.0, 0.0, 0.0])).unwrap();
        assert!(r.max_abs_diff(&col(&[0.5, -0.5, 0.0])).unwrap() < 1e-15);
    }

    #[test]
    fn extend_orthonormal_gives_identity_factor() {
        let f = init_g1(&col(&[1.0, 0.0]), &tol()).unwrap().unwrap();
        let (f2, _) = extend_ok(&f, &col(&[0.0, 1.0]));
        assert!(f2.g().max_abs_diff(&Matrix::identity(2)).unwrap() < 1e-15);
    }

    #[test]
    fn extend_dependent_signals_zero() {
        let f = init_g1(&col(&[1.0, 0.0]), &tol()).unwrap().unwrap();
        match f.extend(&col(&[1.0, 0.0]), &tol()).unwrap() {
            Extend::ZeroSignal { c_tilde } => assert!(c_tilde.frob_norm() < 1e-15),
            Extend::Extended { .. } => panic!("expected zero signal"),
        }
    }

    #[test]
    fn factor_matches_adjugate_inverse_2x2() {
        // C = [(1,1)ᵀ (1,0)ᵀ]: CᵀC = [[2,1],[1,1]], inverse by adjugate
        // (det = 1) is [[1,-1],[-1,2]].
        let f = init_g1(&col(&[1.0, 1.0]), &tol()).unwrap().unwrap();
        let (f2, _) = extend_ok(&f, &col(&[1.0, 0.0]));
        let ggt = f2.g().matmul(&f2.g().transpose()).unwrap();
        let want = Matrix::from_rows(2, 2, &[1.0, -1.0, -1.0, 2.0]).unwrap();
        assert!(ggt.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn b_from_g_simple_and_orthonormal() {
        let f = init_g1(&col(&[1.0, 0.0]), &tol()).unwrap().unwrap();
        assert!(f
            .b_from_g()
            .unwrap()
            .max_abs_diff(&Matrix::from_rows(1, 2, &[1.0, 0.0]).unwrap())
            .unwrap()
            < 1e-15);
        let f = init_g1(&col(&[1.0, 0.0, 0.0]), &tol()).unwrap().unwrap();
        let (f2, _) = extend_ok(&f, &col(&[0.0, 1.0, 0.0]));
        let want = Matrix::from_rows(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(f2.b_from_g().unwrap().max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn b_from_g_is_pinv_of_cols() {
        // Fixed full-column-rank 6x3 C; the MP conditions are the oracle.
        let c = Matrix::from_rows(
            6,
            3,
            &[
                1.0, 0.2, -0.5, 0.3, 1.5, 0.7, -0.4, 0.1, 2.0, 0.9, -1.1, 0.6, 0.0, 0.8, -0.3,
                1.2, 0.4, 0.5,
            ],
        )
        .unwrap();
        let mut f = init_g1(&c.col(0).unwrap(), &tol()).unwrap().unwrap();
        for j in 1..3 {
            f = extend_ok(&f, &c.col(j).unwrap()).0;
        }
        let b_t = f.b_from_g().unwrap();
        let r = mp_residuals(&c, &b_t).unwrap();
        assert!(r.max() <= 1e-9, "residuals {r:?}");
    }

    #[test]
    fn eta_long_form_matches_short_form() {
        // η by cᵀc − cᵀC G Gᵀ Cᵀ c versus 1/√(c̃ᵀc̃).
        let c = Matrix::from_rows(4, 3, &[1.0, 0.5, 0.25, 2.0, -1.0, 0.5, 0.0, 1.0, 1.0, 1.0, 0.0, 3.0])
            .unwrap();
        let mut f = init_g1(&c.col(0).unwrap(), &tol()).unwrap().unwrap();
        for j in 1..3 {
            let ck = c.col(j).unwrap();
            let csq = ck.col_sq_norm(0).unwrap();
            let t = f.cols().transpose().matmul(&ck).unwrap();
            let t = f.g().transpose().matmul(&t).unwrap();
            let proj_sq = t.col_sq_norm(0).unwrap(); // cᵀC G Gᵀ Cᵀ c = |Gᵀ Cᵀ c|²
            let eta_long = 1.0 / (csq - proj_sq).sqrt();
            let (f2, c_tilde) = extend_ok(&f, &ck);
            let eta_short = 1.0 / c_tilde.col_sq_norm(0).unwrap().sqrt();
            assert!((eta_long - eta_short).abs() <= 1e-10 * eta_short.abs());
            // diagonal positivity
            let k = f2.len();
            assert!(f2.g().get(k - 1, k - 1) > 0.0);
            f = f2;
        }
    }
}
