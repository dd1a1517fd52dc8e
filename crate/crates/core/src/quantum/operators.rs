//! Static operators in the (|4⟩, |3⟩, |2⟩, |1⟩) basis.

use super::model::SystemModel;
use crate::{Op, C64};

/// Basis index of level k ∈ {1, 2, 3, 4}.
pub const fn level_index(k: usize) -> usize {
    4 - k
}

/// Is basis index `i` on the excited surface?
pub const fn is_excited(i: usize) -> bool {
    i < 2
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// diag(δ + ω_e, δ, ω_g, 0).
pub fn build_rotating_frame_h0(model: &SystemModel) -> Op {
    Op::from_diagonal(&nalgebra::Vector4::new(
        c(model.detuning + model.omega_e),
        c(model.detuning),
        c(model.omega_g),
        c(0.0),
    ))
}

/// diag(E_e + ω_e, E_e, ω_g, 0) with E_e = δ + ω_L and E_g = 0.
pub fn build_lab_frame_h0(model: &SystemModel, carrier: f64) -> Op {
    let e_e = model.detuning + carrier;
    Op::from_diagonal(&nalgebra::Vector4::new(
        c(e_e + model.omega_e),
        c(e_e),
        c(model.omega_g),
        c(0.0),
    ))
}

/// Franck–Condon pattern: upper-right block [[f24, f14], [f23, f13]]
/// (rows |4⟩, |3⟩; columns |2⟩, |1⟩), lower-left block its adjoint.
pub fn build_coupling(model: &SystemModel) -> Op {
    let up = absorption_block(model);
    up + up.adjoint()
}

/// The upper-right (excited ← ground) half of the coupling pattern. The
/// field operator is V(ε) = ε·A + ε*·A†.
pub fn absorption_block(model: &SystemModel) -> Op {
    let f = model.fc;
    let mut a = Op::zeros();
    a[(0, 2)] = c(f.f24);
    a[(0, 3)] = c(f.f14);
    a[(1, 2)] = c(f.f23);
    a[(1, 3)] = c(f.f13);
    a
}

/// ε·A + ε*·A†.
pub fn field_operator(absorption: &Op, eps: C64) -> Op {
    absorption * eps + absorption.adjoint() * eps.conj()
}

/// Projector onto the excited surface.
pub fn excited_projector() -> Op {
    Op::from_diagonal(&nalgebra::Vector4::new(c(1.0), c(1.0), c(0.0), c(0.0)))
}

/// |3⟩⟨4|.
pub fn relaxation_jump() -> Op {
    let mut s = Op::zeros();
    s[(level_index(3), level_index(4))] = c(1.0);
    s
}

/// Largest |entry| of the blocks connecting the two surfaces.
pub fn inter_surface_norm(op: &Op) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if is_excited(i) != is_excited(j) {
                m = m.max(op[(i, j)].norm());
            }
        }
    }
    m
}
