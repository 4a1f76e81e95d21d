//! Single-column pseudoinverse recursion and the four-condition
//! verification machinery.
//!
//! For `[A | h]` with A⁺ known, the update is
//!
//!   d = A⁺h,   c = h − Ad,
//!   bᵀ = cᵀ/(cᵀc)             if c ≠ 0,
//!   bᵀ = (1 + dᵀd)⁻¹ dᵀ A⁺    if c = 0,
//!   [A | h]⁺ = [A⁺ − d bᵀ; bᵀ].
//!
//! Run column by column this is the slow-but-trusted oracle every block
//! update in this crate is checked against.

use crate::matrix::{Matrix, MatrixError, Tolerance};

/// A matrix paired with its maintained pseudoinverse.
#[derive(Debug, Clone)]
pub struct PinvState {
    a: Matrix,
    a_plus: Matrix,
}

impl PinvState {
    /// Pair a matrix with a claimed pseudoinverse. Only shapes are checked
    /// here; call [`mp_residuals`] to verify the pairing numerically.
    pub fn new(a: Matrix, a_plus: Matrix) -> Result<PinvState, MatrixError> {
        if a.rows() != a_plus.cols() || a.cols() != a_plus.rows() {
            return Err(MatrixError::ShapeMismatch {
                op: "pinv_state",
                lhs_rows: a.rows(),
                lhs_cols: a.cols(),
                rhs_rows: a_plus.rows(),
                rhs_cols: a_plus.cols(),
            });
        }
        Ok(PinvState { a, a_plus })
    }

    /// Build the state from scratch by the column-by-column recursion.
    pub fn from_matrix(a: &Matrix, tol: &Tolerance) -> Result<PinvState, MatrixError> {
        let a_plus = greville_full_pinv(a, tol)?;
        PinvState::new(a.clone(), a_plus)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn a_plus(&self) -> &Matrix {
        &self.a_plus
    }

    /// The range projector A·A⁺.
    pub fn projector(&self) -> Matrix {
        self.a.matmul(&self.a_plus).expect("shapes checked at construction")
    }

    /// Residuals of the four defining conditions for this pairing.
    pub fn residuals(&self) -> MpResiduals {
        mp_residuals(&self.a, &self.a_plus).expect("shapes checked at construction")
    }
}

/// Frobenius norms of the four Moore-Penrose defect matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpResiduals {
    /// ‖A X A − A‖_F
    pub r1: f64,
    /// ‖X A X − X‖_F
    pub r2: f64,
    /// ‖(A X)ᵀ − A X‖_F
    pub r3: f64,
    /// ‖(X A)ᵀ − X A‖_F
    pub r4: f64,
}

impl MpResiduals {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3).max(self.r4)
    }

    /// Acceptance test: every residual within `residual_rel * (1 + ‖a‖_F)`.
    pub fn within(&self, a: &Matrix, tol: &Tolerance) -> bool {
        self.max() <= tol.residual_rel * (1.0 + a.frob_norm())
    }
}

/// Evaluate the four Moore-Penrose conditions for a candidate inverse `x`.
pub fn mp_residuals(a: &Matrix, x: &Matrix) -> Result<MpResiduals, MatrixError> {
    if a.rows() != x.cols() || a.cols() != x.rows() {
        return Err(MatrixError::ShapeMismatch {
            op: "mp_residuals",
            lhs_rows: a.rows(),
            lhs_cols: a.cols(),
            rhs_rows: x.rows(),
            rhs_cols: x.cols(),
        });
    }
    let ax = a.matmul(x)?;
    let xa = x.matmul(a)?;
    let r1 = ax.matmul(a)?.sub(a)?.frob_norm();
    let r2 = xa.matmul(x)?.sub(x)?.frob_norm();
    let r3 = ax.transpose().sub(&ax)?.frob_norm();
    let r4 = xa.transpose().sub(&xa)?.frob_norm();
    Ok(MpResiduals { r1, r2, r3, r4 })
}

/// One Greville step: the pseudoinverse of `[A | h]` from the state for A.
pub fn greville_append_column(
    state: &PinvState,
    h: &Matrix,
    tol: &Tolerance,
) -> Result<PinvState, MatrixError> {
    if h.rows() != state.a.rows() || h.cols() != 1 {
        return Err(MatrixError::ShapeMismatch {
            op: "greville_append_column",
            lhs_rows: state.a.rows(),
            lhs_cols: state.a.cols(),
            rhs_rows: h.rows(),
            rhs_cols: h.cols(),
        });
    }
    let d = state.a_plus.matmul(h)?;
    let c = h.sub(&state.a.matmul(&d)?)?;
    let c_sq = c.col_sq_norm(0)?;
    let tol = tol.resolved_for(h.col_sq_norm(0)?);

    let b_t = if !tol.is_zero(c_sq, 0.0) {
        // c⁺ = cᵀ / (cᵀc)
        c.transpose().scale(1.0 / c_sq)
    } else {
        let d_sq: f64 = d.col_sq_norm(0)?;
        d.transpose().matmul(&state.a_plus)?.scale(1.0 / (1.0 + d_sq))
    };

    let a = state.a.hstack(h)?;
    let a_plus = state.a_plus.sub(&d.matmul(&b_t)?)?.vstack(&b_t)?;
    PinvState::new(a, a_plus)
}

/// Append a block of columns one at a time. This is the p-iteration path;
/// the one-pass block update is benchmarked and verified against it.
pub fn greville_append_block(
    state: &PinvState,
    h_block: &Matrix,
    tol: &Tolerance,
) -> Result<PinvState, MatrixError> {
    let mut state = state.clone();
    for j in 0..h_block.cols() {
        state = greville_append_column(&state, &h_block.col(j)?, tol)?;
    }
    Ok(state)
}

/// Full pseudoinverse built column by column.
///
/// Base case: the pseudoinverse of a single column v is vᵀ/(vᵀv) when v is
/// nonzero (per the tolerance) and the zero row otherwise.
pub fn greville_full_pinv(a: &Matrix, tol: &Tolerance) -> Result<Matrix, MatrixError> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(MatrixError::Empty);
    }
    let v = a.col(0)?;
    let v_sq = v.col_sq_norm(0)?;
    let first = if tol.resolved_for(v_sq).is_zero(v_sq, 0.0) {
        Matrix::zeros(1, a.rows())
    } else {
        v.transpose().scale(1.0 / v_sq)
    };
    let mut state = PinvState::new(v, first)?;
    for j in 1..a.cols() {
        state = greville_append_column(&state, &a.col(j)?, tol)?;
    }
    Ok(state.a_plus)
}
