//! Chirp-effect pairs, parameter sweeps and slope extraction.

mod chirp;
mod compare;
mod fit;
mod phase;
mod setup;
mod sweep;

pub use chirp::{chirp_effect, ChirpEffect, ChirpPair};
pub use compare::{perturbative_comparison, Comparison, ComparisonRecord};
pub use fit::{fit_loglog_slope, SlopeFit};
pub use phase::{default_bins, verify_phase, PhaseReport, SensitivityRow, SENSITIVITY_STEP};
pub use setup::{prepare_pulse, run_full, run_lab, GridParams, PreparedPulse};
pub use sweep::{
    log_spaced, relaxation_sweep, scaling_sweep, sweep_targets, Monotonicity, ScalingFits,
    SeriesFit, SweepRecord, SweepResult, SweepSpec, SweepVariable, WEAK_FIELD_LIMIT,
};
