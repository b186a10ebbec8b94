//! Entropy densities of shift-invariant quasi-free fermionic lattice states.
//!
//! A quasi-free state on `Z^d` that commutes with lattice shifts is fixed by
//! its symbol `q: [0,1]^d -> [0,1]`. This crate computes the Rényi and von
//! Neumann entropy densities of such states, the completely monotone function
//! `g_q` built from them and its inverse Laplace transform, and minimax
//! schemes that estimate the von Neumann density from integer-order Rényi
//! densities with certified error bounds.
//!
//! - [`symbol`]: symbols, Fourier coefficients, finite Toeplitz restrictions.
//! - [`entropy`]: densities `s_q(α)`, the gap `h` and `g_q`.
//! - [`laplace`]: the step function `k`, the kernel `G`, monotonicity checks.
//! - [`approx`]: the basis `f_α` and the plain, shifted and controlled schemes.
//! - [`lattice`]: finite-volume entropies and the Wick-theorem oracle.
//! - [`report`]: tables and figure data comparing against published values.

pub mod approx;
pub mod config;
pub mod dd;
pub mod entropy;
pub mod error;
pub mod lattice;
pub mod laplace;
pub mod quadrature;
pub mod report;
pub mod symbol;

pub use entropy::{EntropyValue, Order};
pub use error::{Error, Result};
pub use quadrature::{Estimate, QuadratureSpec};
pub use symbol::Symbol;
