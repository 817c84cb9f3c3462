//! Dense complex and Hermitian linear algebra.
//!
//! Matrices are dense, row-major and value-semantic. The eigensolver is a
//! cyclic Jacobi iteration on the real-symmetric embedding of a Hermitian
//! matrix, and the SVD is a one-sided Jacobi; both are dependency-free and
//! accurate at desk scale.

mod eigen;
mod matrix;
mod ops;
pub mod random;
mod svd;

pub use eigen::{eigh, jacobi_real_symmetric, EigenDecomposition};
pub use matrix::{C64, ComplexMatrix, HermitianMatrix};
pub use ops::{
    is_psd, is_psd_cholesky, kron, kron_hermitian, kron_with_cap, min_eigenvalue,
    partial_trace, partial_transpose, realign,
};
pub use svd::{svd, Svd};

/// Asymmetry tolerance accepted by Hermitian constructors before the exact
/// symmetrisation step.
pub const HERMITIAN_CONSTRUCTION_TOL: f64 = 1e-12;

/// Default dimension cap for Kronecker products.
pub const KRON_DIM_CAP: usize = 4096;
