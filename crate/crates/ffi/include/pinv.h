#ifndef PINV_H
#define PINV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which backend decides full column rank of the residual block.
 */
typedef enum {
  PinvBackend_InverseCholesky = 0,
  PinvBackend_LibraryCholesky = 1,
} PinvBackend;

/**
 * Status code returned by every fallible function.
 */
typedef enum {
  PinvStatus_Ok = 0,
  PinvStatus_NullArgument = 1,
  PinvStatus_ShapeMismatch = 2,
  PinvStatus_NotPositiveDefinite = 3,
  PinvStatus_Singular = 4,
  PinvStatus_NonFinite = 5,
  PinvStatus_Empty = 6,
  PinvStatus_InvalidArgument = 7,
} PinvStatus;

/**
 * Opaque dense row-major matrix of doubles.
 */
typedef struct PinvMatrix PinvMatrix;

/**
 * Opaque pairing of a matrix with its maintained pseudoinverse.
 */
typedef struct PinvStateHandle PinvStateHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a matrix from a row-major buffer of `rows * cols` doubles.
 *
 * Returns null when the buffer is null, a dimension is zero, or any entry
 * is not finite.
 *
 * # Safety
 * `data` must point to at least `rows * cols` readable doubles.
 */
PinvMatrix *pinv_matrix_new(uintptr_t rows, uintptr_t cols, const double *data);

/**
 * Release a matrix created by this library. Null is a no-op.
 *
 * # Safety
 * `m` must be null or a pointer returned by a `pinv_matrix_*` constructor
 * that has not been freed yet.
 */
void pinv_matrix_free(PinvMatrix *m);

/**
 * Number of rows, or 0 for null.
 *
 * # Safety
 * `m` must be null or a live matrix handle.
 */
uintptr_t pinv_matrix_rows(const PinvMatrix *m);

/**
 * Number of columns, or 0 for null.
 *
 * # Safety
 * `m` must be null or a live matrix handle.
 */
uintptr_t pinv_matrix_cols(const PinvMatrix *m);

/**
 * Copy the matrix into `out` (row-major); `len` is the capacity of `out`
 * in doubles and must be at least rows * cols.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must point to at least `len`
 * writable doubles.
 */
PinvStatus pinv_matrix_copy_data(const PinvMatrix *m, double *out, uintptr_t len);

/**
 * The pseudoinverse of `a` as a fresh matrix handle, built by the
 * column-by-column recursion. `eps` is the squared-norm threshold for
 * treating a residual as zero (1e-10 is the library default).
 *
 * # Safety
 * `a` must be a live matrix handle; `out` must be a valid pointer.
 */
PinvStatus pinv_pinv(const PinvMatrix *a, double eps, PinvMatrix **out);

/**
 * Frobenius norms of the four Moore-Penrose defect matrices for the pair
 * (a, x), written to `out[0..4]`.
 *
 * # Safety
 * `a` and `x` must be live matrix handles; `out` must point to at least 4
 * writable doubles.
 */
PinvStatus pinv_mp_residuals(const PinvMatrix *a, const PinvMatrix *x, double *out);

/**
 * Create a pseudoinverse state for `a`, computing A⁺ from scratch.
 *
 * # Safety
 * `a` must be a live matrix handle; `out` must be a valid pointer.
 */
PinvStatus pinv_state_new(const PinvMatrix *a, double eps, PinvStateHandle **out);

/**
 * Release a state handle. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a live state handle not yet freed.
 */
void pinv_state_free(PinvStateHandle *s);

/**
 * The maintained matrix A as a fresh handle.
 *
 * # Safety
 * `s` must be a live state handle; `out` must be a valid pointer.
 */
PinvStatus pinv_state_a(const PinvStateHandle *s, PinvMatrix **out);

/**
 * The maintained pseudoinverse A⁺ as a fresh handle.
 *
 * # Safety
 * `s` must be a live state handle; `out` must be a valid pointer.
 */
PinvStatus pinv_state_a_plus(const PinvStateHandle *s, PinvMatrix **out);

/**
 * Append a block of columns in one pass, updating the state in place.
 * On error the state is unchanged.
 *
 * # Safety
 * `s` must be a live state handle and `h` a live matrix handle.
 */
PinvStatus pinv_state_append_columns(PinvStateHandle *s,
                                     const PinvMatrix *h,
                                     double eps,
                                     PinvBackend backend);

/**
 * Append a block of rows in one pass, updating the state in place.
 * On error the state is unchanged.
 *
 * # Safety
 * `s` must be a live state handle and `ax` a live matrix handle.
 */
PinvStatus pinv_state_append_rows(PinvStateHandle *s,
                                  const PinvMatrix *ax,
                                  double eps,
                                  PinvBackend backend);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PINV_H */
