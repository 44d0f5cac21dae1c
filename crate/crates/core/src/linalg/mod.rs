//! Numerical kernels: dense small matrices, shifted tridiagonal solves,
//! line-wise grid solves and dense complex eigenvalues.

pub mod dense;
pub mod eigen;
pub mod lines;
pub mod tridiag;

pub use dense::{least_squares, max_abs_diff, numerical_rank, DenseComplexMatrix, Field, Lu, Matrix, Scalar};
pub use eigen::{characteristic_polynomial, eigenvalues, hessenberg, spectral_radius};
pub use lines::{apply_lines, solve_lines, Grid};
pub use tridiag::{factor_shifted, FactoredTridiagonal, Tridiagonal};
