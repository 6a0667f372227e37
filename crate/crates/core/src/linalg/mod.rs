//! Sparse matrices over exact rings and fraction-free elimination.

mod elim;
mod sparse;

pub use elim::{components, determinant, invert, scaled_inverse};
pub use sparse::{Ring, SparseMatrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("fraction-free elimination hit an inexact division")]
    InexactPivot,
}
