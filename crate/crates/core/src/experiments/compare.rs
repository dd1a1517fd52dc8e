use serde::Serialize;

use super::chirp::ChirpPair;
use super::fit::{fit_loglog_slope, SlopeFit};
use super::setup::GridParams;
use crate::perturbation::{delta_n_lgks, delta_n_unitary, LiouvillianPropagator, TransitionTable};
use crate::pulse::{autocorrelation, ChirpedGaussian};
use crate::quantum::{propagate, Defects, DensityMatrix, LindbladGenerator, SystemModel, Target};
use crate::Result;

/// Excited-surface transfer at one μ by full propagation and by the
/// second-order ACF formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub mu: f64,
    pub full: f64,
    /// Field-free dynamics generated by the full Lindblad generator.
    pub lgks: f64,
    /// Field-free dynamics generated by the bare Hamiltonian.
    pub unitary: f64,
    /// |full − lgks|.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub chirp: f64,
    pub records: Vec<ComparisonRecord>,
    /// log-log slope of the residual against μ.
    pub residual_fit: Option<SlopeFit>,
    pub defects: Defects,
}

/// Full propagation against the ACF transfer formula over `mus`, for the
/// +|χ| member of the pulse's chirp pair.
pub fn perturbative_comparison(
    model: &SystemModel,
    pulse: &ChirpedGaussian,
    grids: &GridParams,
    mus: &[f64],
) -> Result<Comparison> {
    let pair = ChirpPair::prepare(pulse, grids)?;
    let field = &pair.pos.field;
    let acf = autocorrelation(field)?;
    let mut records = Vec::with_capacity(mus.len());
    let mut defects = Defects::ideal();
    for &mu in mus {
        let m = model.with_mu(mu);
        m.validate()?;
        let gen = LindbladGenerator::rotating(&m)?;
        let table = TransitionTable::from_generator(&gen, &[(1, 1.0)])?;
        let prop = LiouvillianPropagator::from_generator(&gen);
        let lgks = delta_n_lgks(&table, &acf, &prop, &gen.dipole())?;
        let unitary = delta_n_unitary(&table, &acf)?;
        let traj = propagate(&gen, &DensityMatrix::ground(), field, grids.stride)?;
        defects = defects.worst(traj.defects);
        let full = traj.final_population(Target::ExcitedSurface);
        records.push(ComparisonRecord {
            mu,
            full,
            lgks,
            unitary,
            residual: (full - lgks).abs(),
        });
    }
    let pts: Vec<_> = records.iter().map(|r| (r.mu, r.residual)).collect();
    let residual_fit = match fit_loglog_slope(&pts) {
        Ok(f) => Some(f),
        Err(e) => {
            log::warn!("residual fit skipped: {e}");
            None
        }
    };
    Ok(Comparison {
        chirp: pulse.chirp.abs(),
        records,
        residual_fit,
        defects,
    })
}
