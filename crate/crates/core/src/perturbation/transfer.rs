use super::propagator::{validate_axioms, CoherencePropagator, PropagatorKind};
use super::quadrature::gregory;
use super::transitions::TransitionTable;
use crate::pulse::CorrelationTrace;
use crate::{Error, Op, Result, C64};

/// |C| relative to its maximum below which the lag integral is cut.
pub const TRUNCATION: f64 = 1e-12;
/// |C| relative to its maximum the last available lag must fall below.
pub const TAIL_LIMIT: f64 = 1e-10;

/// The τ ≥ 0 half of the trace, cut after it has decayed below
/// `TRUNCATION`, together with the lag spacing.
fn decayed_half(acf: &CorrelationTrace) -> Result<(&[C64], f64)> {
    if acf.len() < 2 {
        return Err(Error::InsufficientPoints(acf.len()));
    }
    let half = acf.nonnegative();
    let peak = acf.max_abs();
    if peak == 0.0 {
        return Ok((&half[..1], acf.lag_spacing()));
    }
    let tail = half[half.len() - 1].norm() / peak;
    if tail > TAIL_LIMIT {
        return Err(Error::TruncatedTrace {
            tail,
            threshold: TAIL_LIMIT,
        });
    }
    let last = half
        .iter()
        .rposition(|c| c.norm() >= TRUNCATION * peak)
        .unwrap_or(0);
    let end = (last + 2).min(half.len());
    Ok((&half[..end], acf.lag_spacing()))
}

/// ΔN = Σ P(a)|μ_ab|² · 2Re ∫_0^∞ C*(τ) e^{-iω_ba τ} dτ, for field-free
/// dynamics generated by the bare Hamiltonian.
pub fn delta_n_unitary(table: &TransitionTable, acf: &CorrelationTrace) -> Result<f64> {
    let (c, h) = decayed_half(acf)?;
    let mut total = 0.0;
    for t in &table.entries {
        let weight = t.p_a * t.mu_ab.norm_sqr();
        if weight == 0.0 {
            continue;
        }
        let integrand: Vec<C64> = c
            .iter()
            .enumerate()
            .map(|(k, ck)| ck.conj() * C64::from_polar(1.0, -t.omega_ba * k as f64 * h))
            .collect();
        total += weight * 2.0 * gregory(&integrand, h).re;
    }
    Ok(total)
}

/// ΔN = 2Re ∫_0^∞ C*(τ) K(τ) dτ with K(τ) = tr(U(τ)[μ̂ρ0] μ̂†): the
/// coherence created by the dipole acting on the initial state, carried
/// by the field-free propagator and projected back on the dipole.
/// `dipole` is the excited ← ground block μ̂ (see `LindbladGenerator::dipole`).
pub fn delta_n_lgks(
    table: &TransitionTable,
    acf: &CorrelationTrace,
    prop: &dyn CoherencePropagator,
    dipole: &Op,
) -> Result<f64> {
    let (c, h) = decayed_half(acf)?;
    let source = dipole * table.initial_state();
    let probe = dipole.adjoint();
    let orbit = prop.orbit(&source, h, c.len());
    let integrand: Vec<C64> = c
        .iter()
        .zip(&orbit)
        .map(|(ck, x)| ck.conj() * (x * probe).trace())
        .collect();
    Ok(2.0 * gregory(&integrand, h).re)
}

/// Same quadrature as [`delta_n_lgks`]; a propagator of kind `External` is
/// first checked against the axioms that make the ACF formula valid.
pub fn delta_n_general(
    acf: &CorrelationTrace,
    prop: &dyn CoherencePropagator,
    table: &TransitionTable,
    dipole: &Op,
) -> Result<f64> {
    if prop.kind() == PropagatorKind::External {
        validate_axioms(prop, &table.initial_state())?;
    }
    delta_n_lgks(table, acf, prop, dipole)
}
