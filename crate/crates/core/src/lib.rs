//! Local discontinuous Galerkin solver for the two-dimensional backward
//! Feynman-Kac equation written with a fractional substantial derivative,
//!
//! ```text
//!   e^{-κ(x)t} ∂_t^α ( e^{κ(x)t} u ) = Δu + f,   0 < α < 1,
//! ```
//!
//! on a periodic rectangle. Space is discretized by LDG on tensor-product
//! Legendre bases with generalized alternating fluxes; time by the L1 scheme on
//! a graded mesh `t_n = (n/M)^γ T`.
//!
//! Module map:
//!
//! - [`mesh`]: periodic rectangular tessellation and graded time mesh.
//! - [`basis`]: orthonormal Legendre basis, Gauss quadrature, DG fields, L2 projection.
//! - [`fraccalc`]: L1 coefficients, discrete convolution kernels, history operator,
//!   Gamma and Mittag-Leffler functions.
//! - [`ldg`]: flux weights, operator assembly, bilinear form, time stepping.
//! - [`problems`]: the two shipped test problems.
//! - [`analysis`]: Gauss-Radau projections, error functional, rates, condition numbers.

pub mod analysis;
pub mod basis;
pub mod error;
pub mod fraccalc;
pub mod ldg;
pub mod mesh;
pub mod problems;
pub mod sparse;

pub use error::{Error, Result};
