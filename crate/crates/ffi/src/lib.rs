//! C ABI over the incremental pseudoinverse library.
//!
//! Matrices and pseudoinverse states are opaque handles created and freed
//! through paired functions; every fallible call returns a [`PinvStatus`]
//! and writes results through out-pointers. Row-major `double` buffers are
//! the only data interchange.
//!
//! Ownership: every `*_new`/`*_clone` result must be released with the
//! matching `*_free`; all other functions borrow their arguments.

use std::ptr;

use pinv_core::block::Backend;
use pinv_core::{
    append_columns, append_rows, greville_full_pinv, mp_residuals, Matrix, MatrixError, PinvState,
    Tolerance,
};

/// Opaque dense row-major matrix of doubles.
pub struct PinvMatrix(Matrix);

/// Opaque pairing of a matrix with its maintained pseudoinverse.
pub struct PinvStateHandle(PinvState);

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinvStatus {
    Ok = 0,
    NullArgument = 1,
    ShapeMismatch = 2,
    NotPositiveDefinite = 3,
    Singular = 4,
    NonFinite = 5,
    Empty = 6,
    InvalidArgument = 7,
}

/// Which backend decides full column rank of the residual block.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinvBackend {
    InverseCholesky = 0,
    LibraryCholesky = 1,
}

impl From<PinvBackend> for Backend {
    fn from(b: PinvBackend) -> Backend {
        match b {
            PinvBackend::InverseCholesky => Backend::InverseCholesky,
            PinvBackend::LibraryCholesky => Backend::LibraryCholesky,
        }
    }
}

fn status_of(e: &MatrixError) -> PinvStatus {
    match e {
        MatrixError::ShapeMismatch { .. } | MatrixError::IndexOutOfRange { .. } => {
            PinvStatus::ShapeMismatch
        }
        MatrixError::NotPositiveDefinite { .. } => PinvStatus::NotPositiveDefinite,
        MatrixError::Singular { .. } => PinvStatus::Singular,
        MatrixError::NonFinite { .. } => PinvStatus::NonFinite,
        MatrixError::Empty => PinvStatus::Empty,
    }
}

fn tolerance(eps: f64) -> Result<Tolerance, PinvStatus> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(PinvStatus::InvalidArgument);
    }
    Ok(Tolerance {
        zero_sq: eps,
        ..Tolerance::default()
    })
}

/// Create a matrix from a row-major buffer of `rows * cols` doubles.
///
/// Returns null when the buffer is null, a dimension is zero, or any entry
/// is not finite.
///
/// # Safety
/// `data` must point to at least `rows * cols` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn pinv_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
) -> *mut PinvMatrix {
    if data.is_null() || rows == 0 || cols == 0 {
        return ptr::null_mut();
    }
    let slice = std::slice::from_raw_parts(data, rows * cols);
    match Matrix::from_rows(rows, cols, slice) {
        Ok(m) => Box::into_raw(Box::new(PinvMatrix(m))),
        Err(_) => ptr::null_mut(),
    }
}

/// Release a matrix created by this library. Null is a no-op.
///
/// # Safety
/// `m` must be null or a pointer returned by a `pinv_matrix_*` constructor
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn pinv_matrix_free(m: *mut PinvMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of rows, or 0 for null.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn pinv_matrix_rows(m: *const PinvMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// Number of columns, or 0 for null.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn pinv_matrix_cols(m: *const PinvMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

/// Copy the matrix into `out` (row-major); `len` is the capacity of `out`
/// in doubles and must be at least rows * cols.
///
/// # Safety
/// `m` must be a live matrix handle; `out` must point to at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pinv_matrix_copy_data(
    m: *const PinvMatrix,
    out: *mut f64,
    len: usize,
) -> PinvStatus {
    let Some(m) = m.as_ref() else {
        return PinvStatus::NullArgument;
    };
    if out.is_null() {
        return PinvStatus::NullArgument;
    }
    let need = m.0.rows() * m.0.cols();
    if len < need {
        return PinvStatus::ShapeMismatch;
    }
    let dst = std::slice::from_raw_parts_mut(out, need);
    for i in 0..m.0.rows() {
        for j in 0..m.0.cols() {
            dst[i * m.0.cols() + j] = m.0.get(i, j);
        }
    }
    PinvStatus::Ok
}

/// The pseudoinverse of `a` as a fresh matrix handle, built by the
/// column-by-column recursion. `eps` is the squared-norm threshold for
/// treating a residual as zero (1e-10 is the library default).
///
/// # Safety
/// `a` must be a live matrix handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pinv_pinv(
    a: *const PinvMatrix,
    eps: f64,
    out: *mut *mut PinvMatrix,
) -> PinvStatus {
    let (Some(a), false) = (a.as_ref(), out.is_null()) else {
        return PinvStatus::NullArgument;
    };
    let tol = match tolerance(eps) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match greville_full_pinv(&a.0, &tol) {
        Ok(x) => {
            *out = Box::into_raw(Box::new(PinvMatrix(x)));
            PinvStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Frobenius norms of the four Moore-Penrose defect matrices for the pair
/// (a, x), written to `out[0..4]`.
///
/// # Safety
/// `a` and `x` must be live matrix handles; `out` must point to at least 4
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pinv_mp_residuals(
    a: *const PinvMatrix,
    x: *const PinvMatrix,
    out: *mut f64,
) -> PinvStatus {
    let (Some(a), Some(x), false) = (a.as_ref(), x.as_ref(), out.is_null()) else {
        return PinvStatus::NullArgument;
    };
    match mp_residuals(&a.0, &x.0) {
        Ok(r) => {
            let dst = std::slice::from_raw_parts_mut(out, 4);
            dst.copy_from_slice(&[r.r1, r.r2, r.r3, r.r4]);
            PinvStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Create a pseudoinverse state for `a`, computing A⁺ from scratch.
///
/// # Safety
/// `a` must be a live matrix handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pinv_state_new(
    a: *const PinvMatrix,
    eps: f64,
    out: *mut *mut PinvStateHandle,
) -> PinvStatus {
    let (Some(a), false) = (a.as_ref(), out.is_null()) else {
        return PinvStatus::NullArgument;
    };
    let tol = match tolerance(eps) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match PinvState::from_matrix(&a.0, &tol) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(PinvStateHandle(s)));
            PinvStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Release a state handle. Null is a no-op.
///
/// # Safety
/// `s` must be null or a live state handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pinv_state_free(s: *mut PinvStateHandle) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// The maintained matrix A as a fresh handle.
///
/// # Safety
/// `s` must be a live state handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pinv_state_a(
    s: *const PinvStateHandle,
    out: *mut *mut PinvMatrix,
) -> PinvStatus {
    let (Some(s), false) = (s.as_ref(), out.is_null()) else {
        return PinvStatus::NullArgument;
    };
    *out = Box::into_raw(Box::new(PinvMatrix(s.0.a().clone())));
    PinvStatus::Ok
}

/// The maintained pseudoinverse A⁺ as a fresh handle.
///
/// # Safety
/// `s` must be a live state handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pinv_state_a_plus(
    s: *const PinvStateHandle,
    out: *mut *mut PinvMatrix,
) -> PinvStatus {
    let (Some(s), false) = (s.as_ref(), out.is_null()) else {
        return PinvStatus::NullArgument;
    };
    *out = Box::into_raw(Box::new(PinvMatrix(s.0.a_plus().clone())));
    PinvStatus::Ok
}

/// Append a block of columns in one pass, updating the state in place.
/// On error the state is unchanged.
///
/// # Safety
/// `s` must be a live state handle and `h` a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn pinv_state_append_columns(
    s: *mut PinvStateHandle,
    h: *const PinvMatrix,
    eps: f64,
    backend: PinvBackend,
) -> PinvStatus {
    let (Some(s), Some(h)) = (s.as_mut(), h.as_ref()) else {
        return PinvStatus::NullArgument;
    };
    let tol = match tolerance(eps) {
        Ok(t) => t,
        Err(st) => return st,
    };
    match append_columns(&s.0, &h.0, &tol, backend.into()) {
        Ok((next, _)) => {
            s.0 = next;
            PinvStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Append a block of rows in one pass, updating the state in place.
/// On error the state is unchanged.
///
/// # Safety
/// `s` must be a live state handle and `ax` a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn pinv_state_append_rows(
    s: *mut PinvStateHandle,
    ax: *const PinvMatrix,
    eps: f64,
    backend: PinvBackend,
) -> PinvStatus {
    let (Some(s), Some(ax)) = (s.as_mut(), ax.as_ref()) else {
        return PinvStatus::NullArgument;
    };
    let tol = match tolerance(eps) {
        Ok(t) => t,
        Err(st) => return st,
    };
    match append_rows(&s.0, &ax.0, &tol, backend.into()) {
        Ok((next, _)) => {
            s.0 = next;
            PinvStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn mat(rows: usize, cols: usize, data: &[f64]) -> *mut PinvMatrix {
        let m = pinv_matrix_new(rows, cols, data.as_ptr());
        assert!(!m.is_null());
        m
    }

    #[test]
    fn matrix_round_trip() {
        unsafe {
            let m = mat(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
            assert_eq!(pinv_matrix_rows(m), 2);
            assert_eq!(pinv_matrix_cols(m), 3);
            let mut buf = [0.0f64; 6];
            assert_eq!(pinv_matrix_copy_data(m, buf.as_mut_ptr(), 6), PinvStatus::Ok);
            assert_eq!(buf, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
            assert_eq!(
                pinv_matrix_copy_data(m, buf.as_mut_ptr(), 5),
                PinvStatus::ShapeMismatch
            );
            pinv_matrix_free(m);
        }
    }

    #[test]
    fn invalid_constructions_return_null() {
        unsafe {
            assert!(pinv_matrix_new(0, 2, [0.0; 2].as_ptr()).is_null());
            assert!(pinv_matrix_new(1, 2, std::ptr::null()).is_null());
            assert!(pinv_matrix_new(1, 2, [1.0, f64::NAN].as_ptr()).is_null());
        }
    }

    #[test]
    fn pinv_and_residuals() {
        unsafe {
            // A = [[2,0],[0,0]] has pseudoinverse [[0.5,0],[0,0]].
            let a = mat(2, 2, &[2.0, 0.0, 0.0, 0.0]);
            let mut x = std::ptr::null_mut();
            assert_eq!(pinv_pinv(a, 1e-10, &mut x), PinvStatus::Ok);
            let mut buf = [0.0f64; 4];
            assert_eq!(pinv_matrix_copy_data(x, buf.as_mut_ptr(), 4), PinvStatus::Ok);
            assert_eq!(buf, [0.5, 0.0, 0.0, 0.0]);
            let mut r = [0.0f64; 4];
            assert_eq!(pinv_mp_residuals(a, x, r.as_mut_ptr()), PinvStatus::Ok);
            assert!(r.iter().all(|&v| v <= 1e-12));
            pinv_matrix_free(x);
            pinv_matrix_free(a);
        }
    }

    #[test]
    fn state_append_columns_and_rows() {
        unsafe {
            let a = mat(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
            let mut s = std::ptr::null_mut();
            assert_eq!(pinv_state_new(a, 1e-10, &mut s), PinvStatus::Ok);

            let h = mat(3, 1, &[1.0, 2.0, 3.0]);
            assert_eq!(
                pinv_state_append_columns(s, h, 1e-10, PinvBackend::InverseCholesky),
                PinvStatus::Ok
            );
            let ax = mat(1, 3, &[0.5, -1.0, 2.0]);
            assert_eq!(
                pinv_state_append_rows(s, ax, 1e-10, PinvBackend::LibraryCholesky),
                PinvStatus::Ok
            );

            // The maintained pair still satisfies the four conditions.
            let mut cur_a = std::ptr::null_mut();
            let mut cur_x = std::ptr::null_mut();
            assert_eq!(pinv_state_a(s, &mut cur_a), PinvStatus::Ok);
            assert_eq!(pinv_state_a_plus(s, &mut cur_x), PinvStatus::Ok);
            assert_eq!(pinv_matrix_rows(cur_a), 4);
            assert_eq!(pinv_matrix_cols(cur_a), 3);
            let mut r = [0.0f64; 4];
            assert_eq!(pinv_mp_residuals(cur_a, cur_x, r.as_mut_ptr()), PinvStatus::Ok);
            assert!(r.iter().all(|&v| v <= 1e-8), "{r:?}");

            pinv_matrix_free(cur_a);
            pinv_matrix_free(cur_x);
            pinv_matrix_free(ax);
            pinv_matrix_free(h);
            pinv_state_free(s);
            pinv_matrix_free(a);
        }
    }

    #[test]
    fn shape_errors_leave_state_untouched() {
        unsafe {
            let a = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
            let mut s = std::ptr::null_mut();
            assert_eq!(pinv_state_new(a, 1e-10, &mut s), PinvStatus::Ok);
            let bad = mat(3, 1, &[1.0, 2.0, 3.0]);
            assert_eq!(
                pinv_state_append_columns(s, bad, 1e-10, PinvBackend::InverseCholesky),
                PinvStatus::ShapeMismatch
            );
            assert_eq!(
                pinv_state_append_columns(s, bad, -1.0, PinvBackend::InverseCholesky),
                PinvStatus::InvalidArgument
            );
            let mut cur_a = std::ptr::null_mut();
            assert_eq!(pinv_state_a(s, &mut cur_a), PinvStatus::Ok);
            assert_eq!(pinv_matrix_cols(cur_a), 2);
            pinv_matrix_free(cur_a);
            pinv_matrix_free(bad);
            pinv_state_free(s);
            pinv_matrix_free(a);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut out = std::ptr::null_mut();
            assert_eq!(
                pinv_state_new(std::ptr::null(), 1e-10, &mut out),
                PinvStatus::NullArgument
            );
            assert_eq!(
                pinv_mp_residuals(std::ptr::null(), std::ptr::null(), std::ptr::null_mut()),
                PinvStatus::NullArgument
            );
            pinv_matrix_free(std::ptr::null_mut());
            pinv_state_free(std::ptr::null_mut());
            assert_eq!(pinv_matrix_rows(std::ptr::null()), 0);
        }
    }
}
