//! Symmetric eigenvalue machinery: a dense reference solver, Lanczos
//! iteration, and deflation of the `±1` eigenpairs of dilations.

pub mod dense;
pub mod lanczos;
pub mod tridiag;

pub use dense::{dense_nth_magnitude, dense_symmetric_eigen, dense_symmetric_spectrum};
pub use lanczos::{
    lanczos_nth_magnitude, lanczos_third_eigenvalue, lanczos_third_magnitude,
    spectral_radius_deflated, DeflationPair, Deflated, DenseOperator, DilationOperator,
    LanczosOptions, SymmetricOperator,
};

/// Dimension (of the dilated operator) at or below which dense solves are
/// used in production.
pub const DENSE_CUTOFF: usize = 64;
