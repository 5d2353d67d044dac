//! Numerical study of the Airy process.
//!
//! The Airy process A(t) is the stationary process describing the scaled top
//! eigenvalue of Hermitian matrix diffusion at the soft spectral edge. This
//! crate computes its one- and two-time distributions by three independent
//! routes and cross-checks them against each other:
//!
//! * [`painleve`] solves the Hastings–McLeod equation q'' = alpha q + 2 q^3
//!   and builds the one-time (Tracy–Widom) distribution
//!   F2(u) = exp(-int_u^inf (alpha - u) q^2 dalpha) plus the tail integrals
//!   that feed the large-separation expansion.
//! * [`kernel`] evaluates joint distributions as Fredholm determinants of the
//!   extended Airy kernel, discretized by Nystrom quadrature.
//! * [`mc`] samples coupled Gaussian Hermitian matrix pairs and estimates the
//!   same joint distributions empirically at finite matrix size.
//!
//! On top of these sit [`expansion`] (the large-separation series
//! P = F2 F2 + F2' F2'/t^2 + (Phi(u,v)+Phi(v,u))/t^4 + ... and the covariance
//! constants it implies) and [`pde`] (finite-difference residuals of the
//! third-order PDE satisfied by log of the two-time distribution, plus the
//! closed-form recursion identities obeyed by the expansion terms).
//!
//! Everything is deterministic: quadrature rules are explicit, the Monte
//! Carlo RNG is a counter-based generator keyed by (seed, stream id), and all
//! defaults are recorded in the types that carry them.

// Reference constants are recorded to their full known precision even where
// f64 rounds the last digits, and validation guards are written in the
// NaN-rejecting form !(x > 0.0) on purpose.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airy;
pub mod cache;
pub mod cli;
pub mod error;
pub mod expansion;
pub mod kernel;
pub mod mc;
pub mod numerics;
pub mod painleve;
pub mod pde;

pub use error::{Error, Result};
