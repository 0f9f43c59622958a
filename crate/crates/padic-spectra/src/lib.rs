//! Spectral theory of p-adic Schrödinger-type operators with point
//! interactions: exact arithmetic on Q_p, Haar quadrature, the wavelet
//! eigenbasis of the fractional operator, Green's functions, and eigenvalue
//! location for finite-rank singular perturbations.
//!
//! The crate is organized bottom-up:
//!
//! - [`padic`] — exact rationals with a prime context: valuations, norms,
//!   fractional parts, characters, coset representatives.
//! - [`haar`] — exact integration and Fourier transforms of modulated ball
//!   indicators; the independent quadrature oracle.
//! - [`wavelet`] — the orthonormal eigenbasis, finite wavelet sums, the
//!   diagonal fractional action, delta expansions, dilation.
//! - [`mseries`] — the spectral M-series with rigorous truncation bounds.
//! - [`green`] — the Green's function of (D^alpha - lambda) with a delta
//!   source: radial values, wavelet coefficients, norms.
//! - [`operator`] — operator realizations: boundary mappings, the matrix
//!   M(lambda), characteristic-determinant eigenvalue searches, the Krein
//!   resolvent.
//! - [`models`] — the worked one- and two-point models: Friedrichs spectrum
//!   classification, symmetric and parity-twisted couplings, spectral shift,
//!   homogeneity checks.

pub mod error;
pub mod haar;
pub mod jsonio;
pub mod linalg;
pub mod models;
pub mod mseries;
pub mod operator;
pub mod padic;
pub mod scan;
pub mod selftest;
pub mod wavelet;

pub mod green;

pub use error::{Error, Result};
