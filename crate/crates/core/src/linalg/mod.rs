//! Sparse matrices, a Cholesky wrapper and a generalized symmetric
//! eigensolver for the smallest part of the spectrum.

mod eigen;
mod sparse;

pub use eigen::{lowest_eigenpairs, EigenOptions, EigenPairs};
pub use sparse::{Cholesky, CsrMatrix, Triplet};
