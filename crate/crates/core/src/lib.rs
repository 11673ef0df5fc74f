//! Spectral simulation and verification for the energy-critical nonlinear
//! Schrödinger equation in a harmonic trap,
//! `i u_t = (-Δ/2 + |x|²/2) u + μ |u|^p u`.

pub mod cutoff;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod harness;
pub mod hermite;
pub mod nls;
pub mod profiles;
pub mod propagators;
pub mod quadrature;
pub mod variational;

pub use error::{Error, Result};
pub use field::{Field, Grid};
pub use num_complex::Complex64;
