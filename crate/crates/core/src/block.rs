//! One-pass block pseudoinverse updates.
//!
//! `append_columns` maintains A⁺ while a block H of p columns is appended
//! to A; `append_rows` is the dual for stacking rows. Each while-pass over
//! the remaining columns computes
//!
//!   D = A⁺H,   C = H − AD,
//!
//! scans C with the incremental inverse Cholesky factor until a residual
//! c̃ vanishes, commits the independent prefix in one shot via
//! Bᵀ = G Gᵀ Cᵀ, then commits the following run of in-range columns via
//! the C = 0 dispatch (three algebraically equal formulas, picked by the
//! cheapest inverse), and restarts on whatever is left.

use std::time::{Duration, Instant};

use crate::greville::PinvState;
use crate::invchol::{init_g1, Extend, InvCholFactor};
use crate::matrix::{Matrix, MatrixError, Tolerance};

/// Which backend decides full column rank of C and produces C⁺.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Incremental inverse Cholesky scan (the default).
    InverseCholesky,
    /// Library-style route: factor CᵀC with a dense Cholesky; a failed
    /// factorization plays the role of the zero-residual signal.
    LibraryCholesky,
}

/// Which C = 0 formula produced Bᵀ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CZeroFormula {
    /// (I + DᵀD)⁻¹ D̃, picked when m ≥ max(n, p).
    DtD,
    /// (I + D̃H)⁻¹ D̃, picked when n ≥ m ≥ p.
    DtH,
    /// D̃ (I + H D̃)⁻¹, picked when m ≤ p.
    HDt,
}

/// One while-pass of the update, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchTag {
    /// The whole remaining block was in range and went through (I+DᵀD)⁻¹D̃.
    CZeroDtD,
    /// As above via (I+D̃H)⁻¹D̃.
    CZeroDtH,
    /// As above via D̃(I+HD̃)⁻¹.
    CZeroHDt,
    /// Every residual was nonzero; the whole remaining block committed as
    /// C⁺ in one shot.
    FullRankCpinv,
    /// Mixed pass: an independent prefix and/or a dependent run, with the
    /// loop restarting on the remainder.
    MixedRestart,
}

impl BranchTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchTag::CZeroDtD => "czero_dtd",
            BranchTag::CZeroDtH => "czero_dth",
            BranchTag::CZeroHDt => "czero_hdt",
            BranchTag::FullRankCpinv => "full_rank_cpinv",
            BranchTag::MixedRestart => "mixed_restart",
        }
    }
}

/// Dispatch record for one while-pass: `k_reached` independent columns
/// committed via the factored C⁺, then a run of `delta` in-range columns.
#[derive(Debug, Clone, Copy)]
pub struct DispatchBranch {
    pub tag: BranchTag,
    pub k_reached: usize,
    pub delta: usize,
}

/// What happened during one block update.
#[derive(Debug, Clone)]
pub struct BlockUpdateReport {
    pub branches: Vec<DispatchBranch>,
    pub mp: crate::greville::MpResiduals,
    pub columns_processed: usize,
    pub elapsed: Duration,
}

/// D = A⁺·H and C = H − A·D for a block of new columns.
pub fn compute_d_c(state: &PinvState, h_block: &Matrix) -> Result<(Matrix, Matrix), MatrixError> {
    if h_block.rows() != state.a().rows() {
        return Err(MatrixError::ShapeMismatch {
            op: "compute_d_c",
            lhs_rows: state.a().rows(),
            lhs_cols: state.a().cols(),
            rhs_rows: h_block.rows(),
            rhs_cols: h_block.cols(),
        });
    }
    let d = state.a_plus().matmul(h_block)?;
    let c = h_block.sub(&state.a().matmul(&d)?)?;
    Ok((d, c))
}

/// D̃ = Dᵀ·A⁺.
pub fn d_tilde(state: &PinvState, d: &Matrix) -> Result<Matrix, MatrixError> {
    if d.rows() != state.a_plus().rows() {
        return Err(MatrixError::ShapeMismatch {
            op: "d_tilde",
            lhs_rows: state.a_plus().rows(),
            lhs_cols: state.a_plus().cols(),
            rhs_rows: d.rows(),
            rhs_cols: d.cols(),
        });
    }
    d.transpose().matmul(state.a_plus())
}

/// Bᵀ for an in-range block (C = 0 established by the caller).
///
/// The three formulas are algebraically equal by the push-through identity
/// (I+PQ)⁻¹P = P(I+QP)⁻¹; the size rule only picks the smallest inverse.
/// Ties resolve in the order DtD, DtH, HDt.
pub fn b_for_c_zero(
    state: &PinvState,
    h_block: &Matrix,
    d: &Matrix,
) -> Result<(Matrix, CZeroFormula), MatrixError> {
    let m = state.a().rows();
    let n = state.a().cols();
    let p = h_block.cols();
    let dt = d_tilde(state, d)?;
    if m >= n.max(p) {
        let s = Matrix::identity(p).add(&d.transpose().matmul(d)?)?;
        Ok((s.solve_spd(&dt)?, CZeroFormula::DtD))
    } else if n >= m && m >= p {
        // D̃H = DᵀA⁺H = DᵀD, so this system is symmetric up to rounding.
        let s = Matrix::identity(p).add(&dt.matmul(h_block)?)?;
        Ok((s.solve_spd(&dt)?, CZeroFormula::DtH))
    } else {
        // I + H·D̃ is square but not symmetric; solve the transposed
        // system with LU: Bᵀ = D̃(I+HD̃)⁻¹ = ((I+HD̃)⁻ᵀ D̃ᵀ)ᵀ.
        let s = Matrix::identity(m).add(&h_block.matmul(&dt)?)?;
        let b = s.transpose().solve_lu(&dt.transpose())?;
        Ok((b.transpose(), CZeroFormula::HDt))
    }
}

/// All three C = 0 formulas regardless of the size rule, for cross-checks.
pub fn b_for_c_zero_all(
    state: &PinvState,
    h_block: &Matrix,
    d: &Matrix,
) -> Result<[Matrix; 3], MatrixError> {
    let m = state.a().rows();
    let p = h_block.cols();
    let dt = d_tilde(state, d)?;
    let s_a = Matrix::identity(p).add(&d.transpose().matmul(d)?)?;
    let b_a = s_a.solve_spd(&dt)?;
    let s_b = Matrix::identity(p).add(&dt.matmul(h_block)?)?;
    let b_b = s_b.solve_spd(&dt)?;
    let s_c = Matrix::identity(m).add(&h_block.matmul(&dt)?)?;
    let b_c = s_c.transpose().solve_lu(&dt.transpose())?.transpose();
    Ok([b_a, b_b, b_c])
}

fn czero_tag(formula: CZeroFormula) -> BranchTag {
    match formula {
        CZeroFormula::DtD => BranchTag::CZeroDtD,
        CZeroFormula::DtH => BranchTag::CZeroDtH,
        CZeroFormula::HDt => BranchTag::CZeroHDt,
    }
}

/// Commit a block with known Bᵀ: new A = [A | H], new A⁺ = [A⁺ − D·Bᵀ; Bᵀ].
fn commit_columns(
    state: &PinvState,
    h_block: &Matrix,
    d: &Matrix,
    b_t: &Matrix,
) -> Result<PinvState, MatrixError> {
    let a = state.a().hstack(h_block)?;
    let a_plus = state.a_plus().sub(&d.matmul(b_t)?)?.vstack(b_t)?;
    PinvState::new(a, a_plus)
}

/// Maintain A⁺ under the append of a block H of columns.
pub fn append_columns(
    state: &PinvState,
    h_block: &Matrix,
    tol: &Tolerance,
    backend: Backend,
) -> Result<(PinvState, BlockUpdateReport), MatrixError> {
    if h_block.rows() != state.a().rows() || h_block.cols() == 0 {
        return Err(MatrixError::ShapeMismatch {
            op: "append_columns",
            lhs_rows: state.a().rows(),
            lhs_cols: state.a().cols(),
            rhs_rows: h_block.rows(),
            rhs_cols: h_block.cols(),
        });
    }
    let start = Instant::now();
    let p = h_block.cols();
    let mut state = state.clone();
    let mut branches = Vec::new();
    let mut i = 0;

    while i < p {
        let h_rem = h_block.col_range(i, p)?;
        let rem = p - i;
        let (d, c) = compute_d_c(&state, &h_rem)?;

        if backend == Backend::LibraryCholesky {
            let first_ref = h_rem.col_sq_norm(0)?;
            let first_zero = tol
                .resolved_for(first_ref)
                .is_zero(c.col_sq_norm(0)?, 0.0);
            if !first_zero {
                if let Ok(omega) = c.transpose().matmul(&c)?.cholesky() {
                    // Bᵀ = Ω⁻ᵀ Ω⁻¹ Cᵀ via two triangular solves.
                    let y = omega.solve_lower_tri(&c.transpose())?;
                    let b_t = omega.solve_lower_tri_transposed(&y)?;
                    state = commit_columns(&state, &h_rem, &d, &b_t)?;
                    branches.push(DispatchBranch {
                        tag: BranchTag::FullRankCpinv,
                        k_reached: rem,
                        delta: 0,
                    });
                    i = p;
                    continue;
                }
            }
            // Singular or leading zero column: fall through to the scan
            // pass below, which makes partial progress and restarts.
        }

        // Scan C with the incremental factor until a zero residual.
        let mut factor: Option<InvCholFactor> = None;
        let mut k = 0;
        let mut hit_zero = false;
        for j in 0..rem {
            let cj = c.col(j)?;
            let col_tol = tol.resolved_for(h_rem.col_sq_norm(j)?);
            match &factor {
                None => match init_g1(&cj, &col_tol)? {
                    Some(f) => factor = Some(f),
                    None => {
                        hit_zero = true;
                        break;
                    }
                },
                Some(f) => match f.extend(&cj, &col_tol)? {
                    Extend::Extended { factor: f2, .. } => factor = Some(f2),
                    Extend::ZeroSignal { .. } => {
                        hit_zero = true;
                        break;
                    }
                },
            }
            k += 1;
        }

        if k >= 1 {
            let f = factor.as_ref().expect("factor exists when k >= 1");
            let b_t = f.b_from_g()?;
            let h_k = h_rem.col_range(0, k)?;
            let d_k = d.col_range(0, k)?;
            state = commit_columns(&state, &h_k, &d_k, &b_t)?;
        }

        let mut delta = 0;
        let mut formula = None;
        if hit_zero {
            delta = 1;
            if k == 0 {
                // Extend the run over consecutive zero columns of C.
                for j in 1..rem {
                    let col_tol = tol.resolved_for(h_rem.col_sq_norm(j)?);
                    if col_tol.is_zero(c.col_sq_norm(j)?, 0.0) {
                        delta += 1;
                    } else {
                        break;
                    }
                }
            }
            let h_delta = h_rem.col_range(k, k + delta)?;
            let d_delta = if k == 0 {
                d.col_range(0, delta)?
            } else {
                // The base pseudoinverse changed when the prefix committed.
                state.a_plus().matmul(&h_delta)?
            };
            let (b_t, used) = b_for_c_zero(&state, &h_delta, &d_delta)?;
            state = commit_columns(&state, &h_delta, &d_delta, &b_t)?;
            formula = Some(used);
        }

        debug_assert!(k + delta >= 1, "no progress in block update pass");
        let tag = if delta == 0 {
            BranchTag::FullRankCpinv
        } else if k == 0 && delta == rem {
            czero_tag(formula.expect("formula set when delta > 0"))
        } else {
            BranchTag::MixedRestart
        };
        branches.push(DispatchBranch {
            tag,
            k_reached: k,
            delta,
        });
        i += k + delta;
    }

    // Stop the clock before the reporting-only residual evaluation so
    // `elapsed` measures the update itself.
    let elapsed = start.elapsed();
    let mp = state.residuals();
    let report = BlockUpdateReport {
        branches,
        mp,
        columns_processed: p,
        elapsed,
    };
    Ok((state, report))
}

/// Dᵀ = Aₓ·A⁺ and C = Aₓᵀ − Aᵀ·D for a block of new rows.
pub fn compute_d_c_rows(
    state: &PinvState,
    ax_block: &Matrix,
) -> Result<(Matrix, Matrix), MatrixError> {
    if ax_block.cols() != state.a().cols() {
        return Err(MatrixError::ShapeMismatch {
            op: "compute_d_c_rows",
            lhs_rows: state.a().rows(),
            lhs_cols: state.a().cols(),
            rhs_rows: ax_block.rows(),
            rhs_cols: ax_block.cols(),
        });
    }
    let d = ax_block.matmul(state.a_plus())?.transpose();
    let c = ax_block
        .transpose()
        .sub(&state.a().transpose().matmul(&d)?)?;
    Ok((d, c))
}

/// B for an in-range row block, the transposed three-way dispatch with
/// size conditions n ≥ max(m, q), m ≥ n ≥ q, n ≤ q.
pub fn b_for_c_zero_rows(
    state: &PinvState,
    ax_block: &Matrix,
    d: &Matrix,
) -> Result<(Matrix, CZeroFormula), MatrixError> {
    let m = state.a().rows();
    let n = state.a().cols();
    let q = ax_block.rows();
    // D̃ᵀ = A⁺·D (n x q).
    let dt_t = state.a_plus().matmul(d)?;
    if n >= m.max(q) {
        let s = Matrix::identity(q).add(&d.transpose().matmul(d)?)?;
        // B = D̃ᵀ (I + DᵀD)⁻¹, solved through the symmetric system.
        Ok((s.solve_spd(&dt_t.transpose())?.transpose(), CZeroFormula::DtD))
    } else if m >= n && n >= q {
        // Aₓ·D̃ᵀ = Aₓ·A⁺·D = Dᵀ·D, symmetric up to rounding.
        let s = Matrix::identity(q).add(&ax_block.matmul(&dt_t)?)?;
        Ok((s.solve_spd(&dt_t.transpose())?.transpose(), CZeroFormula::DtH))
    } else {
        // B = (I + D̃ᵀAₓ)⁻¹ D̃ᵀ with a non-symmetric n x n system.
        let s = Matrix::identity(n).add(&dt_t.matmul(ax_block)?)?;
        Ok((s.solve_lu(&dt_t)?, CZeroFormula::HDt))
    }
}

/// Commit a row block: new A = [A; Aₓ], new A⁺ = [A⁺ − B·Dᵀ | B].
fn commit_rows(
    state: &PinvState,
    ax_block: &Matrix,
    d: &Matrix,
    b: &Matrix,
) -> Result<PinvState, MatrixError> {
    let a = state.a().vstack(ax_block)?;
    let a_plus = state.a_plus().sub(&b.matmul(&d.transpose())?)?.hstack(b)?;
    PinvState::new(a, a_plus)
}

/// Maintain A⁺ under the append of a block Aₓ of rows.
pub fn append_rows(
    state: &PinvState,
    ax_block: &Matrix,
    tol: &Tolerance,
    backend: Backend,
) -> Result<(PinvState, BlockUpdateReport), MatrixError> {
    if ax_block.cols() != state.a().cols() || ax_block.rows() == 0 {
        return Err(MatrixError::ShapeMismatch {
            op: "append_rows",
            lhs_rows: state.a().rows(),
            lhs_cols: state.a().cols(),
            rhs_rows: ax_block.rows(),
            rhs_cols: ax_block.cols(),
        });
    }
    let start = Instant::now();
    let q = ax_block.rows();
    let mut state = state.clone();
    let mut branches = Vec::new();
    let mut i = 0;

    while i < q {
        let ax_rem = ax_block.row_range(i, q)?;
        let rem = q - i;
        let (d, c) = compute_d_c_rows(&state, &ax_rem)?;

        if backend == Backend::LibraryCholesky {
            let first_ref = ax_rem.row_range(0, 1)?.frob_norm().powi(2);
            let first_zero = tol
                .resolved_for(first_ref)
                .is_zero(c.col_sq_norm(0)?, 0.0);
            if !first_zero {
                if let Ok(omega) = c.transpose().matmul(&c)?.cholesky() {
                    // B = ((CᵀC)⁻¹Cᵀ)ᵀ = C Ω⁻ᵀ Ω⁻¹ ... computed as C (GGᵀ).
                    let y = omega.solve_lower_tri(&c.transpose())?;
                    let b = omega.solve_lower_tri_transposed(&y)?.transpose();
                    state = commit_rows(&state, &ax_rem, &d, &b)?;
                    branches.push(DispatchBranch {
                        tag: BranchTag::FullRankCpinv,
                        k_reached: rem,
                        delta: 0,
                    });
                    i = q;
                    continue;
                }
            }
        }

        let mut factor: Option<InvCholFactor> = None;
        let mut k = 0;
        let mut hit_zero = false;
        for j in 0..rem {
            let cj = c.col(j)?;
            let ref_sq = ax_rem.row_range(j, j + 1)?.frob_norm().powi(2);
            let col_tol = tol.resolved_for(ref_sq);
            match &factor {
                None => match init_g1(&cj, &col_tol)? {
                    Some(f) => factor = Some(f),
                    None => {
                        hit_zero = true;
                        break;
                    }
                },
                Some(f) => match f.extend(&cj, &col_tol)? {
                    Extend::Extended { factor: f2, .. } => factor = Some(f2),
                    Extend::ZeroSignal { .. } => {
                        hit_zero = true;
                        break;
                    }
                },
            }
            k += 1;
        }

        if k >= 1 {
            let f = factor.as_ref().expect("factor exists when k >= 1");
            // B = C G Gᵀ, the transpose of the column-case Bᵀ.
            let b = f.b_from_g()?.transpose();
            let ax_k = ax_rem.row_range(0, k)?;
            let d_k = d.col_range(0, k)?;
            state = commit_rows(&state, &ax_k, &d_k, &b)?;
        }

        let mut delta = 0;
        let mut formula = None;
        if hit_zero {
            delta = 1;
            if k == 0 {
                for j in 1..rem {
                    let ref_sq = ax_rem.row_range(j, j + 1)?.frob_norm().powi(2);
                    if tol.resolved_for(ref_sq).is_zero(c.col_sq_norm(j)?, 0.0) {
                        delta += 1;
                    } else {
                        break;
                    }
                }
            }
            let ax_delta = ax_rem.row_range(k, k + delta)?;
            let d_delta = if k == 0 {
                d.col_range(0, delta)?
            } else {
                ax_delta.matmul(state.a_plus())?.transpose()
            };
            let (b, used) = b_for_c_zero_rows(&state, &ax_delta, &d_delta)?;
            state = commit_rows(&state, &ax_delta, &d_delta, &b)?;
            formula = Some(used);
        }

        debug_assert!(k + delta >= 1, "no progress in row update pass");
        let tag = if delta == 0 {
            BranchTag::FullRankCpinv
        } else if k == 0 && delta == rem {
            czero_tag(formula.expect("formula set when delta > 0"))
        } else {
            BranchTag::MixedRestart
        };
        branches.push(DispatchBranch {
            tag,
            k_reached: k,
            delta,
        });
        i += k + delta;
    }

    let elapsed = start.elapsed();
    let mp = state.residuals();
    let report = BlockUpdateReport {
        branches,
        mp,
        columns_processed: q,
        elapsed,
    };
    Ok((state, report))
}
