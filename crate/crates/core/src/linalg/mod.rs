//! Exact linear algebra over the rationals.
//!
//! Elimination is fraction-free: rows are scaled to primitive integer vectors
//! and combined with gcd-reduced multipliers. The first attempt runs on
//! checked `i64` arithmetic and restarts on `BigInt` if anything overflows.

mod dense;
mod echelon;
mod matrix;
mod rat;

use thiserror::Error;

pub use dense::dense_rref;
pub use echelon::{
    annihilator, image_basis, in_span, inverse, kernel_basis, quotient_dims, rank, rref,
    rref_with_transform, solve, solve_columns, sparse_rref, subspace_sum, EchelonBasis, Quotient,
    Rref, DENSE_CUTOFF,
};
pub use matrix::{SparseRatMatrix, SparseVec};
pub use rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational {0:?}")]
    ParseRat(String),
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("column {column} of the subspace is not in the ambient span")]
    ContainmentViolation { column: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}
