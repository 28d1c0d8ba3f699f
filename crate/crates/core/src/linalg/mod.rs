//! Dense and sparse linear algebra kernels.
//!
//! Everything downstream works on desk-scale systems (a few thousand
//! unknowns at most), so generalized eigenproblems, kernel bases and the
//! implicit step matrices are handled densely on top of `nalgebra`. The
//! sparse [`SparseMatrix`] type exists for finite-element assembly and for
//! MatrixMarket exchange; it is converted to dense before any factorization.

mod dense;
mod eig;
pub mod mtx;
mod nullspace;
mod saddle;
mod sparse;

pub use dense::{
    cholesky, ensure_finite, ensure_finite_vector, gram_norm, lu_solve, relative_asymmetry,
    symmetrize, Densify, LuFactorization,
};
pub use eig::{sym_generalized_eig, sym_generalized_eigenvalues, sym_eigenvalues, GeneralizedEigen};
pub use nullspace::{nullspace_basis, numerical_rank, singular_values};
pub use saddle::{saddle_factorize, SaddleFactorization};
pub use sparse::{SparseMatrix, TripletBuilder};

use thiserror::Error;

/// Dense real matrix.
pub type DenseMatrix = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type Vector = nalgebra::DVector<f64>;

/// A pivot whose magnitude falls below this fraction of the largest absolute
/// matrix entry marks the matrix as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;
/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-11;
/// Largest relative Frobenius asymmetry accepted for "symmetric" inputs.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("Gram matrix is not symmetric positive definite")]
    GramNotSpd,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;
