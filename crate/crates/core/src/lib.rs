//! Exact dynamics of two nonidentical two-level atoms resonantly coupled to a
//! single cavity mode prepared in a coherent state, together with the normal
//! (quadrature) and amplitude-squared squeezing of the field.
//!
//! Time is dimensionless throughout: `tau = g1 * t`, so the first atom's
//! coupling is 1 and the second atom's coupling is the ratio `R = g2 / g1`.
//!
//! The state lives in excitation blocks. Block `n` spans
//! `|++, n-2>`, `|+-, n-1>`, `|-+, n-1>`, `|--, n>`, and starting from the
//! atomic ground state each block evolves independently from `(0, 0, 0, 1)`.
//!
//! Two independent routes produce the block amplitudes:
//! [`closed_form`] evaluates the analytic solution, and [`fock_oracle`]
//! integrates the block equations with RK4. Field moments are computed
//! directly from the state vector ([`fock_oracle::moments`]); the
//! A-coefficient series in [`observables::series`] is kept as a cross-check.

pub mod closed_form;
pub mod error;
pub mod fock_oracle;
pub mod matrix_oracle;
pub mod observables;
pub mod params;
pub mod reference;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use params::ModelParams;

/// Complex amplitude type used everywhere in the crate.
pub type C64 = num_complex::Complex64;
