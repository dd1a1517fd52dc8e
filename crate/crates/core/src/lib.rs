//! Weak-field phase-only control in Markovian open quantum systems.
//!
//! The crate propagates a four-level Lindblad model (two vibrational levels
//! on each of two electronic surfaces) under chirped Gaussian pulses, and
//! evaluates the leading-order population transfer directly from the field
//! autocorrelation function. Comparing the two routes exposes the scaling
//! structure of phase-only control: population transfer grows as μ², while
//! any dependence on the spectral phase (e.g. the sign of the chirp) first
//! appears at μ⁴.
//!
//! Module map:
//!
//! - [`pulse`]: spectral synthesis, time-domain transforms, correlation
//!   functions and phase-sensitivity diagnostics.
//! - [`quantum`]: system model, rotating/lab-frame generators and the RK4
//!   master-equation propagator.
//! - [`perturbation`]: second-order transfer from the ACF, field-free
//!   propagators and their validation, energy bookkeeping.
//! - [`experiments`]: chirp-effect pairs, μ and γ sweeps, log-log fits.
//! - [`config`], [`output`], [`cli`]: run configuration and file outputs
//!   behind the `wfpo` binary.
//!
//! Units: ħ = 1 and all frequencies are in reciprocal time units.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod perturbation;
pub mod pulse;
pub mod quantum;

pub use error::{Axiom, Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// 4×4 complex operator in the (|4⟩, |3⟩, |2⟩, |1⟩) basis.
pub type Op = nalgebra::Matrix4<C64>;
