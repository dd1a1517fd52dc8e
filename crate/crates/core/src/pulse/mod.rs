//! Chirped Gaussian pulses: spectral synthesis, time-domain fields,
//! correlation functions and phase-sensitivity diagnostics.
//!
//! Transform convention: ε(t) = ∫ ε̃(ω) e^{-iωt} dω, so that
//! ∫|ε(t)|² dt = 2π ∫|ε̃(ω)|² dω.

mod correlation;
mod grid;
mod masks;
mod sensitivity;
mod spectral;
mod transform;

pub use correlation::{
    autocorrelation, cross_correlation_with_derivative, periodic_autocorrelation,
    periodic_cross_correlation_with_derivative, CorrelationTrace,
};
pub use grid::{chirped_duration, FrequencyGrid, TimeGrid};
pub use masks::random_phase_masks;
pub use sensitivity::{functional_scale, phase_sensitivity, Functional, MAX_STEP};
pub use spectral::{
    apply_phase_mask, synth_chirped_gaussian, ChirpedGaussian, SpectralPulse, NORM_DEFICIT_LIMIT,
    NORM_TOLERANCE,
};
pub use transform::{to_time_domain, to_time_domain_periodic, TimeField, BOUNDARY_DECAY};

/// Parseval constant of the transform convention.
pub const PARSEVAL: f64 = 2.0 * std::f64::consts::PI;
