use serde::Serialize;

use super::model::SystemModel;
use super::operators::{
    absorption_block, build_lab_frame_h0, build_rotating_frame_h0, field_operator,
    inter_surface_norm, relaxation_jump,
};
use crate::{Error, Op, Result, C64};

/// Frame the static Hamiltonian is written in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "frame")]
pub enum Frame {
    /// Carrier removed; the field enters as its envelope Λ(t).
    Rotating,
    /// Full field ε(t) = Λ(t) e^{-iω_L t}.
    Lab { carrier: f64 },
}

/// dρ/dt = −i[H0 + μV(ε), ρ] + Σ_j (L_j ρ L_j† − ½{L_j†L_j, ρ}).
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    pub h0: Op,
    /// Excited ← ground half of the coupling pattern.
    pub absorption: Op,
    pub mu: f64,
    /// Jump operators with their rates folded in.
    pub jumps: Vec<Op>,
    pub frame: Frame,
    decay: Op,
}

impl LindbladGenerator {
    pub fn new(h0: Op, absorption: Op, mu: f64, jumps: Vec<Op>, frame: Frame) -> Result<Self> {
        if (h0 - h0.adjoint()).iter().any(|z| z.norm() > 0.0) {
            return Err(Error::param("h0", "static Hamiltonian must be Hermitian"));
        }
        if let Some(j) = jumps.iter().position(|l| inter_surface_norm(l) > 0.0) {
            return Err(Error::param(
                "jump_ops",
                format!("jump operator {j} couples the two electronic surfaces"),
            ));
        }
        let decay = jumps
            .iter()
            .fold(Op::zeros(), |acc, l| acc + l.adjoint() * l);
        Ok(Self {
            h0,
            absorption,
            mu,
            jumps,
            frame,
            decay,
        })
    }

    /// Rotating-frame generator with relaxation √γ |3⟩⟨4|.
    pub fn rotating(model: &SystemModel) -> Result<Self> {
        model.validate()?;
        Self::new(
            build_rotating_frame_h0(model),
            absorption_block(model),
            model.mu,
            jumps_for(model),
            Frame::Rotating,
        )
    }

    /// Lab-frame generator for carrier ω_L.
    pub fn lab(model: &SystemModel, carrier: f64) -> Result<Self> {
        model.validate()?;
        if !carrier.is_finite() {
            return Err(Error::param("carrier", "must be finite"));
        }
        Self::new(
            build_lab_frame_h0(model, carrier),
            absorption_block(model),
            model.mu,
            jumps_for(model),
            Frame::Lab { carrier },
        )
    }

    /// Σ_j L_j† L_j.
    pub fn decay_operator(&self) -> &Op {
        &self.decay
    }

    /// Total Hamiltonian H0 + μV(ε).
    pub fn hamiltonian(&self, eps: C64) -> Op {
        let (e, ec) = (eps * self.mu, eps.conj() * self.mu);
        let a = &self.absorption;
        Op::from_fn(|i, j| self.h0[(i, j)] + a[(i, j)] * e + a[(j, i)].conj() * ec)
    }

    /// μ·A, whose trace against ρ is the coherence d = tr(μ̂ρ_c) that
    /// multiplies ε in the transfer rate.
    pub fn dipole(&self) -> Op {
        self.absorption * C64::new(self.mu, 0.0)
    }

    /// d = μ tr(A ρ) = μ Σ A_ba ρ_ab: only the ground–excited coherences
    /// contribute.
    pub fn dipole_coherence(&self, rho: &Op) -> C64 {
        let mut d = C64::new(0.0, 0.0);
        for b in 0..2 {
            for a in 2..4 {
                d += self.absorption[(b, a)] * rho[(a, b)];
            }
        }
        d * self.mu
    }

    /// dρ/dt for Hermitian ρ. Uses ρH = (Hρ)† and ρK = (Kρ)† for the
    /// Hermitian H and K = Σ L†L, so the result is exactly Hermitian.
    pub fn rhs(&self, rho: &Op, eps: C64) -> Op {
        let h = self.hamiltonian(eps);
        let x = mul(&h, rho);
        let mut out = Op::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let c = x[(i, j)] - x[(j, i)].conj();
                out[(i, j)] = C64::new(c.im, -c.re);
            }
        }
        if !self.jumps.is_empty() {
            for l in &self.jumps {
                out += mul(&mul(l, rho), &l.adjoint());
            }
            let y = mul(&self.decay, rho);
            for i in 0..4 {
                for j in 0..4 {
                    out[(i, j)] -= (y[(i, j)] + y[(j, i)].conj()) * 0.5;
                }
            }
        }
        out
    }

    /// Largest rate scale for the step-size condition: the operator norm of
    /// the Hamiltonian (bounded by ‖H0‖ + μ|ε|_max ‖V(1)‖) and the total jump rate.
    pub fn rate_scale(&self, eps_max: f64) -> f64 {
        let h_norm = self
            .h0
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()));
        let v_norm = field_operator(&self.absorption, C64::new(1.0, 0.0))
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()));
        let gamma = self.decay.trace().re;
        (h_norm + self.mu * eps_max * v_norm).max(gamma)
    }
}

/// Fixed-size product; faster than the generic path for 4×4 complex.
fn mul(a: &Op, b: &Op) -> Op {
    let mut out = Op::zeros();
    for j in 0..4 {
        for k in 0..4 {
            let bkj = b[(k, j)];
            if bkj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..4 {
                out[(i, j)] += a[(i, k)] * bkj;
            }
        }
    }
    out
}

fn jumps_for(model: &SystemModel) -> Vec<Op> {
    if model.gamma > 0.0 {
        vec![relaxation_jump() * C64::new(model.gamma.sqrt(), 0.0)]
    } else {
        Vec::new()
    }
}

/// Wrapper for the free function form.
pub fn lindblad_rhs(gen: &LindbladGenerator, rho: &Op, eps: C64) -> Op {
    gen.rhs(rho, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::operators::{excited_projector, level_index};
    use crate::quantum::state::DensityMatrix;

    #[test]
    fn ground_state_is_stationary_without_field() {
        let g = LindbladGenerator::rotating(&SystemModel::table1()).unwrap();
        let r = g.rhs(&DensityMatrix::ground().0, C64::new(0.0, 0.0));
        assert_eq!(r, Op::zeros());
    }

    #[test]
    fn single_jump_relaxation_rates() {
        let m = SystemModel::table1().with_gamma(1.0);
        let g = LindbladGenerator::rotating(&m).unwrap();
        let r = g.rhs(&DensityMatrix::pure(4).unwrap().0, C64::new(0.0, 0.0));
        let (i4, i3) = (level_index(4), level_index(3));
        let mut expect = Op::zeros();
        expect[(i4, i4)] = C64::new(-1.0, 0.0);
        expect[(i3, i3)] = C64::new(1.0, 0.0);
        assert!((r - expect).norm() < 1e-15);
    }

    #[test]
    fn excited_population_is_conserved_without_field() {
        let g = LindbladGenerator::rotating(&SystemModel::table1().with_gamma(0.7)).unwrap();
        let mut rho = Op::from_fn(|i, j| C64::new((i + j) as f64 * 0.1, i as f64 - j as f64));
        rho = rho + rho.adjoint();
        let r = g.rhs(&rho, C64::new(0.0, 0.0));
        assert!((excited_projector() * r).trace().norm() < 1e-15);
    }

    #[test]
    fn surface_coupling_jump_is_rejected() {
        let m = SystemModel::table1();
        let mut bad = Op::zeros();
        bad[(3, 0)] = C64::new(1.0, 0.0);
        let err = LindbladGenerator::new(
            build_rotating_frame_h0(&m),
            absorption_block(&m),
            m.mu,
            vec![bad],
            Frame::Rotating,
        );
        assert!(err.is_err());
    }

    #[test]
    fn rate_scale_bounds_the_hamiltonian() {
        let g = LindbladGenerator::rotating(&SystemModel::table1()).unwrap();
        assert!((g.rate_scale(0.0) - 0.5).abs() < 1e-12);
        let lab = LindbladGenerator::lab(&SystemModel::table1(), 10.0).unwrap();
        assert!((lab.rate_scale(0.0) - 10.3).abs() < 1e-12);
    }
}
