//! Shared dense numerical kernels: Gauss–Legendre quadrature, LU
//! determinants, a complex-Hermitian eigensolver, central finite-difference
//! stencils, and the deterministic Gaussian stream used by the Monte Carlo
//! module. Everything here is self-contained; matrix sizes stay small enough
//! (a few hundred) that unblocked textbook algorithms are the right tool.

pub mod hermitian;
pub mod matrix;
pub mod quad;
pub mod rng;
pub mod stencil;

pub use hermitian::{hermitian_eigenvalues, HermitianMatrix};
pub use matrix::{lu_log_det, DenseMatrix};
pub use quad::{composite_gauss_legendre, gauss_legendre, Quadrature};
pub use rng::RandomStream;
pub use stencil::{fd_partial, StencilGrid};
