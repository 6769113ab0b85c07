//! Dense complex linear algebra: matrices, the eigensolver and pencil linearization.

mod eig;
mod lu;
mod matrix;
mod qep;

pub use eig::{eig_dense, eig_dense_with, eigenvalues, EigOptions, EigenDecomposition, MAX_DIMENSION};
pub use matrix::{ComplexMatrix, RealMatrix};
pub use qep::{companion_monic, qep_linearize};
