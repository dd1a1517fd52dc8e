use serde::Serialize;

use super::setup::{prepare_pulse, GridParams, PreparedPulse};
use crate::pulse::ChirpedGaussian;
use crate::quantum::{
    propagate, Defects, DensityMatrix, LindbladGenerator, SystemModel, Target, Trajectory,
};
use crate::{Error, Result};

/// Final target populations for +|χ| and −|χ| and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChirpEffect {
    pub dn_pos: f64,
    pub dn_neg: f64,
    /// dn_pos − dn_neg.
    pub effect: f64,
    /// Worst invariant defects over both runs.
    pub defects: Defects,
}

/// The two fields of a chirp pair, synthesized once and reused across
/// model parameters.
#[derive(Debug, Clone)]
pub struct ChirpPair {
    pub pos: PreparedPulse,
    pub neg: PreparedPulse,
}

impl ChirpPair {
    pub fn prepare(pulse: &ChirpedGaussian, grids: &GridParams) -> Result<Self> {
        let chi = pulse.chirp.abs();
        let pos = prepare_pulse(&pulse.with_chirp(chi), grids).map_err(branch("positive chirp"))?;
        let neg = prepare_pulse(&pulse.with_chirp(-chi), grids).map_err(branch("negative chirp"))?;
        Ok(Self { pos, neg })
    }

    /// Rotating-frame runs of both branches from |1⟩⟨1|.
    pub fn propagate(&self, model: &SystemModel, stride: usize) -> Result<(Trajectory, Trajectory)> {
        let gen = LindbladGenerator::rotating(model)?;
        let rho0 = DensityMatrix::ground();
        let pos = propagate(&gen, &rho0, &self.pos.field, stride).map_err(branch("positive chirp"))?;
        let neg = propagate(&gen, &rho0, &self.neg.field, stride).map_err(branch("negative chirp"))?;
        Ok((pos, neg))
    }

    pub fn effect(&self, model: &SystemModel, stride: usize, target: Target) -> Result<ChirpEffect> {
        target.validate()?;
        let (pos, neg) = self.propagate(model, stride)?;
        Ok(effect_of(&pos, &neg, target))
    }
}

pub(crate) fn effect_of(pos: &Trajectory, neg: &Trajectory, target: Target) -> ChirpEffect {
    let dn_pos = pos.final_population(target);
    let dn_neg = neg.final_population(target);
    ChirpEffect {
        dn_pos,
        dn_neg,
        effect: dn_pos - dn_neg,
        defects: pos.defects.worst(neg.defects),
    }
}

fn branch(name: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Branch {
        branch: name,
        source: Box::new(e),
    }
}

/// Two full propagations differing only in the sign of the chirp;
/// effect = ΔN(+|χ|) − ΔN(−|χ|). With χ = 0 both branches are identical
/// and the effect vanishes.
pub fn chirp_effect(
    model: &SystemModel,
    pulse: &ChirpedGaussian,
    grids: &GridParams,
    target: Target,
) -> Result<ChirpEffect> {
    ChirpPair::prepare(pulse, grids)?.effect(model, grids.stride, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unchirped_pair_has_no_effect() {
        let pulse = ChirpedGaussian::new(1.0, 0.0, 0.0).unwrap();
        let grids = GridParams::default();
        let e = chirp_effect(&SystemModel::table1(), &pulse, &grids, Target::Level(2)).unwrap();
        assert_eq!(e.effect, 0.0);
        assert_eq!(e.dn_pos, e.dn_neg);
    }

    #[test]
    fn branch_failures_are_labelled() {
        let pulse = ChirpedGaussian::new(1.0, 2.0, 0.0).unwrap();
        let grids = GridParams {
            rk4_step: Some(0.2),
            ..GridParams::default()
        };
        let model = SystemModel {
            omega_g: 1.0,
            ..SystemModel::table1()
        };
        match chirp_effect(&model, &pulse, &grids, Target::ExcitedSurface) {
            Err(Error::Branch { branch, .. }) => assert_eq!(branch, "positive chirp"),
            other => panic!("expected a branch error, got {other:?}"),
        }
    }
}
