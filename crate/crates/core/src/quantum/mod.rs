//! The two-surface, four-level system and its master-equation dynamics.
//!
//! Basis order is (|4⟩, |3⟩, |2⟩, |1⟩): upper and lower excited levels,
//! then upper and lower ground levels. Relaxation |4⟩ → |3⟩ acts inside
//! the excited surface only.

mod generator;
mod model;
mod operators;
mod propagate;
mod state;

pub use generator::{lindblad_rhs, Frame, LindbladGenerator};
pub use model::{FranckCondon, SystemModel};
pub use operators::{
    absorption_block, build_coupling, build_lab_frame_h0, build_rotating_frame_h0,
    excited_projector, field_operator, inter_surface_norm, is_excited, level_index,
    relaxation_jump,
};
pub use propagate::{propagate, Trajectory, MAX_STEP_RATE};
pub use state::{
    population, Defects, DensityMatrix, Target, HERMITICITY_TOLERANCE, POSITIVITY_TOLERANCE,
    TRACE_TOLERANCE,
};
