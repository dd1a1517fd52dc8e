use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use crate::quantum::{excited_projector, LindbladGenerator};
use crate::{Axiom, Error, Op, Result, C64};

/// 16×16 superoperator acting on column-major vec(ρ).
pub type Superop = SMatrix<C64, 16, 16>;
type Vec16 = SVector<C64, 16>;

/// Tolerance of the axiom checks.
pub const AXIOM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorKind {
    Unitary,
    Lgks,
    External,
}

/// Field-free propagation X ↦ U(τ)X of operators.
pub trait CoherencePropagator: Sync {
    fn kind(&self) -> PropagatorKind;

    fn apply(&self, x: &Op, tau: f64) -> Op;

    /// U(k·step)X for k = 0..n.
    fn orbit(&self, x: &Op, step: f64, n: usize) -> Vec<Op> {
        (0..n).map(|k| self.apply(x, k as f64 * step)).collect()
    }
}

/// Propagator generated by a time-independent superoperator, U(τ) = e^{Lτ}.
#[derive(Debug, Clone)]
pub struct LiouvillianPropagator {
    generator: Superop,
    kind: PropagatorKind,
}

impl LiouvillianPropagator {
    /// Field-free part of `gen`: unitary when it has no jump operators.
    pub fn from_generator(gen: &LindbladGenerator) -> Self {
        let kind = if gen.jumps.is_empty() {
            PropagatorKind::Unitary
        } else {
            PropagatorKind::Lgks
        };
        Self {
            generator: lindblad_superoperator(&gen.h0, &gen.jumps),
            kind,
        }
    }

    /// Any superoperator, e.g. one with extra dephasing channels.
    pub fn external(generator: Superop) -> Self {
        Self {
            generator,
            kind: PropagatorKind::External,
        }
    }

    pub fn generator(&self) -> &Superop {
        &self.generator
    }

    pub fn map(&self, tau: f64) -> Superop {
        (self.generator * C64::new(tau, 0.0)).exp()
    }
}

impl CoherencePropagator for LiouvillianPropagator {
    fn kind(&self) -> PropagatorKind {
        self.kind
    }

    fn apply(&self, x: &Op, tau: f64) -> Op {
        unvec(&(self.map(tau) * vec(x)))
    }

    /// Iterates the one-step map, which is exact for a semigroup.
    fn orbit(&self, x: &Op, step: f64, n: usize) -> Vec<Op> {
        let s = self.map(step);
        let mut v = vec(x);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(unvec(&v));
            v = s * v;
        }
        out
    }
}

/// L(X) = −i[H, X] + Σ_j (L_j X L_j† − ½{L_j†L_j, X}) as a matrix on
/// vec(X), using vec(AXB) = (Bᵀ ⊗ A) vec(X).
pub fn lindblad_superoperator(h: &Op, jumps: &[Op]) -> Superop {
    let id = Op::identity();
    let mut s = (kron(&id, h) - kron(&h.transpose(), &id)) * C64::new(0.0, -1.0);
    for l in jumps {
        let k = l.adjoint() * l;
        s += kron(&l.conjugate(), l);
        s -= (kron(&id, &k) + kron(&k.transpose(), &id)) * C64::new(0.5, 0.0);
    }
    s
}

fn kron(a: &Op, b: &Op) -> Superop {
    Superop::from_fn(|r, c| a[(r / 4, c / 4)] * b[(r % 4, c % 4)])
}

fn vec(x: &Op) -> Vec16 {
    Vec16::from_column_slice(x.as_slice())
}

fn unvec(v: &Vec16) -> Op {
    Op::from_column_slice(v.as_slice())
}

fn basis(i: usize, j: usize) -> Op {
    let mut e = Op::zeros();
    e[(i, j)] = C64::new(1.0, 0.0);
    e
}

fn max_abs(x: &Op) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Lags at which the axioms are probed.
const PROBE_LAGS: [f64; 3] = [0.37, 1.0, 4.2];

/// Checks the conditions under which the ACF formula holds for a
/// field-free propagator:
/// identity at zero lag, time homogeneity U(t1+t2) = U(t1)U(t2),
/// invariance of the initial state `rho0`, and conservation of the
/// excited-surface trace tr(P_e U(t)X) = tr(P_e X).
/// Operators are probed on the basis matrices E_ij.
pub fn validate_axioms(prop: &dyn CoherencePropagator, rho0: &Op) -> Result<()> {
    let fail = |axiom, detail: String| Err(Error::AxiomViolation { axiom, detail });
    let pe = excited_projector();
    for i in 0..4 {
        for j in 0..4 {
            let e = basis(i, j);
            let d = max_abs(&(prop.apply(&e, 0.0) - e));
            if d > AXIOM_TOLERANCE {
                return fail(Axiom::Identity, format!("|U(0)E_{i}{j} − E_{i}{j}| = {d:.3e}"));
            }
            for (&t1, &t2) in PROBE_LAGS.iter().zip(PROBE_LAGS.iter().rev()) {
                let joint = prop.apply(&e, t1 + t2);
                let chained = prop.apply(&prop.apply(&e, t2), t1);
                let d = max_abs(&(joint - chained)) / max_abs(&joint).max(1.0);
                if d > AXIOM_TOLERANCE {
                    return fail(
                        Axiom::TimeHomogeneity,
                        format!("U({t1}+{t2}) differs from U({t1})U({t2}) by {d:.3e} on E_{i}{j}"),
                    );
                }
            }
            let before = (pe * e).trace();
            for &t in &PROBE_LAGS {
                let after = (pe * prop.apply(&e, t)).trace();
                let d = (after - before).norm();
                if d > AXIOM_TOLERANCE {
                    return fail(
                        Axiom::SurfaceTraceConservation,
                        format!("tr(P_e U({t})E_{i}{j}) drifts by {d:.3e}"),
                    );
                }
            }
        }
    }
    for &t in &PROBE_LAGS {
        let d = max_abs(&(prop.apply(rho0, t) - rho0));
        if d > AXIOM_TOLERANCE {
            return fail(
                Axiom::InitialStateInvariance,
                format!("|U({t})ρ0 − ρ0| = {d:.3e}"),
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{DensityMatrix, SystemModel};

    #[test]
    fn superoperator_matches_the_generator() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1().with_mu(0.0)).unwrap();
        let s = lindblad_superoperator(&gen.h0, &gen.jumps);
        let x = Op::from_fn(|i, j| C64::new(i as f64 + 0.3, j as f64 - 1.0));
        let x = x + x.adjoint();
        let direct = gen.rhs(&x, C64::new(0.0, 0.0));
        assert!((unvec(&(s * vec(&x))) - direct).norm() < 1e-14);
    }

    #[test]
    fn unitary_coherence_picks_up_transition_phase() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1().with_gamma(0.0)).unwrap();
        let prop = LiouvillianPropagator::from_generator(&gen);
        assert_eq!(prop.kind(), PropagatorKind::Unitary);
        let x = basis(0, 3);
        let y = prop.apply(&x, 2.0);
        let expect = C64::from_polar(1.0, -0.3 * 2.0);
        assert!((y[(0, 3)] - expect).norm() < 1e-13);
    }

    #[test]
    fn orbit_agrees_with_direct_application() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1()).unwrap();
        let prop = LiouvillianPropagator::from_generator(&gen);
        let x = basis(0, 2) + basis(1, 3);
        let orbit = prop.orbit(&x, 0.05, 201);
        let direct = prop.apply(&x, 10.0);
        assert!((orbit[200] - direct).norm() < 1e-12);
    }

    #[test]
    fn lgks_propagator_satisfies_axioms() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1()).unwrap();
        let prop = LiouvillianPropagator::from_generator(&gen);
        validate_axioms(&prop, &DensityMatrix::ground().0).unwrap();
    }

    #[test]
    fn surface_coupling_violates_trace_conservation() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1()).unwrap();
        let leak = basis(3, 0) * C64::new(0.2, 0.0);
        let prop = LiouvillianPropagator::external(lindblad_superoperator(&gen.h0, &[leak]));
        match validate_axioms(&prop, &DensityMatrix::ground().0) {
            Err(Error::AxiomViolation { axiom, .. }) => {
                assert_eq!(axiom, Axiom::SurfaceTraceConservation)
            }
            other => panic!("expected an axiom violation, got {other:?}"),
        }
    }
}
