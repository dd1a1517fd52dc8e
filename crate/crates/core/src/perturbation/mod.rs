//! Leading-order population transfer from the field autocorrelation, the
//! field-free propagators it relies on, and energy bookkeeping along a
//! propagated trajectory.

mod energy;
mod propagator;
mod quadrature;
mod transfer;
mod transitions;

pub use energy::{
    adiabaticity, continuous_wave, energy_absorption, EnergyAbsorption, ENVELOPE_FLOOR,
    STRIDE_TOLERANCE,
};
pub use propagator::{
    lindblad_superoperator, validate_axioms, CoherencePropagator, LiouvillianPropagator,
    PropagatorKind, Superop, AXIOM_TOLERANCE,
};
pub use quadrature::gregory;
pub use transfer::{delta_n_general, delta_n_lgks, delta_n_unitary, TAIL_LIMIT, TRUNCATION};
pub use transitions::{Transition, TransitionTable};
