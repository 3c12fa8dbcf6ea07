//! Numerical core for simulating nonclassical interference between a heralded
//! single photon from a group-velocity-matched SPDC source and a weak coherent
//! state.
//!
//! The crate is `#![no_std]` and only needs `alloc`. All IO, configuration
//! files and the command-line front end live in the `homsim-std` crate.
//!
//! Pipeline:
//!
//! * [`crystal`]: KDP dispersion, type-II (eoe) phase mismatch, phase-matching
//!   angle and group-velocity-matching searches.
//! * [`jsa`]: joint spectral amplitude `f = φ·α` on a frequency grid.
//! * [`schmidt`]: Schmidt coefficients, Schmidt number `K` and purity `γ = 1/K`.
//! * [`hom`]: closed-form three-fold coincidence curve and visibility law.
//! * [`focksim`]: exact truncated Fock-space model of the beam splitter and
//!   threshold detectors, plus seeded Monte Carlo counting.
//! * [`fit`]: Poisson-weighted Gaussian dip fitting.
#![no_std]
// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod crystal;
mod error;
pub mod fit;
pub mod focksim;
pub mod hom;
pub mod jsa;
pub mod linalg;
pub mod schmidt;
pub mod units;

pub use error::{Error, Result};
pub use units::GaussianSpectrum;
