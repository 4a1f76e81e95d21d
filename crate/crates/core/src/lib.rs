//! Incremental Moore-Penrose pseudoinverse maintenance.
//!
//! The crate keeps `A⁺` up to date while `A` grows by blocks of columns
//! or rows, committing each block in one pass instead of one column at a
//! time. An incremental inverse Cholesky factor of `CᵀC` (where `C` is
//! the out-of-range part of the new block) detects rank deficiency on
//! the fly and doubles as the factored pseudoinverse of `C`; runs of
//! in-range columns are committed together through a three-way dispatch
//! that always inverts the smallest of the candidate Gram matrices.
//!
//! Modules:
//! - [`matrix`]: dense f64 kernel (products, Cholesky, SPD/LU solves).
//! - [`greville`]: the single-column recursion and the four-condition
//!   verification oracle.
//! - [`invchol`]: the incremental inverse Cholesky factor.
//! - [`block`]: the one-pass column and row block updates.
//! - [`harness`]: seeded corpus generation, verification sweeps, and
//!   benchmarks behind the `pinvtool` CLI.

pub mod block;
pub mod greville;
pub mod harness;
pub mod invchol;
pub mod io;
pub mod matrix;

pub use block::{append_columns, append_rows, Backend, BlockUpdateReport};
pub use greville::{greville_full_pinv, mp_residuals, MpResiduals, PinvState};
pub use matrix::{Matrix, MatrixError, Tolerance};
