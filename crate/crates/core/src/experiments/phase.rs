use serde::Serialize;

use super::setup::GridParams;
use crate::perturbation::{delta_n_lgks, LiouvillianPropagator, TransitionTable};
use crate::pulse::{
    functional_scale, periodic_autocorrelation, phase_sensitivity, random_phase_masks,
    synth_chirped_gaussian, to_time_domain_periodic, ChirpedGaussian, Functional, SpectralPulse,
};
use crate::quantum::{LindbladGenerator, SystemModel};
use crate::{Error, Result};

/// Finite-difference step used by [`verify_phase`].
pub const SENSITIVITY_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub bin: usize,
    pub omega: f64,
    /// Estimates divided by the maximum of the respective unperturbed trace.
    pub acf: f64,
    pub xcf: f64,
    pub field: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    pub masks: usize,
    pub seed: Option<u64>,
    /// Largest relative L∞ change of C(τ) over all masks.
    pub max_acf_deviation: f64,
    /// Largest relative change of the second-order transfer over all masks.
    pub max_transfer_deviation: f64,
    pub reference_transfer: f64,
    pub sensitivity: Vec<SensitivityRow>,
}

impl PhaseReport {
    pub fn max_correlation_sensitivity(&self) -> f64 {
        self.sensitivity
            .iter()
            .map(|r| r.acf.max(r.xcf))
            .fold(0.0, f64::max)
    }

    pub fn min_field_sensitivity(&self) -> f64 {
        self.sensitivity
            .iter()
            .map(|r| r.field)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Bins at ω_L + kΔω/2, k = −4..=4.
pub fn default_bins(pulse: &SpectralPulse) -> Vec<usize> {
    let p = pulse.params();
    (-4..=4)
        .map(|k| {
            let w = p.carrier + 0.5 * k as f64 * p.bandwidth;
            ((w - pulse.grid.omega_min) / pulse.grid.spacing()).round() as usize
        })
        .collect()
}

/// Phase-blindness checks on the pulse's spectrum: `masks` random
/// spectral phases (uniform per bin) must leave C(τ) and the ACF transfer
/// unchanged, and single-bin phase derivatives of C and D must vanish
/// while that of ε(t) does not. Random masks need a seed.
pub fn verify_phase(
    model: &SystemModel,
    pulse: &ChirpedGaussian,
    grids: &GridParams,
    masks: usize,
    seed: Option<u64>,
    bins: Option<&[usize]>,
) -> Result<PhaseReport> {
    let seed = match (masks, seed) {
        (0, s) => s,
        (_, Some(s)) => Some(s),
        (_, None) => return Err(Error::SeedlessViolation("random phase masks")),
    };
    grids.validate()?;
    model.validate()?;
    let spectral = synth_chirped_gaussian(
        pulse.bandwidth,
        pulse.chirp,
        pulse.carrier,
        grids.frequency_grid(pulse)?,
    )?;

    let gen = LindbladGenerator::rotating(model)?;
    let table = TransitionTable::from_generator(&gen, &[(1, 1.0)])?;
    let prop = LiouvillianPropagator::from_generator(&gen);
    let dipole = gen.dipole();
    let transfer = |p: &SpectralPulse| -> Result<_> {
        let acf = periodic_autocorrelation(&to_time_domain_periodic(p)?);
        let dn = delta_n_lgks(&table, &acf, &prop, &dipole)?;
        Ok((acf, dn))
    };
    let (acf0, dn0) = transfer(&spectral)?;
    let mut max_acf_deviation: f64 = 0.0;
    let mut max_transfer_deviation: f64 = 0.0;
    if let Some(seed) = seed {
        for mask in random_phase_masks(seed, spectral.grid.n_points, masks) {
            let (acf, dn) = transfer(&spectral.apply_phase_mask(&mask)?)?;
            max_acf_deviation = max_acf_deviation.max(acf.relative_linf_distance(&acf0)?);
            max_transfer_deviation = max_transfer_deviation.max((dn - dn0).abs() / dn0.abs());
        }
    }

    let bins = match bins {
        Some(b) => b.to_vec(),
        None => default_bins(&spectral),
    };
    let acf_scale = functional_scale(&spectral, Functional::Acf)?;
    let xcf_scale = functional_scale(&spectral, Functional::Xcf)?;
    let field_scale = functional_scale(&spectral, Functional::Field)?;
    let sensitivity = bins
        .iter()
        .map(|&bin| {
            let s = |f| phase_sensitivity(&spectral, f, bin, SENSITIVITY_STEP);
            Ok(SensitivityRow {
                bin,
                omega: spectral.grid.point(bin),
                acf: s(Functional::Acf)? / acf_scale,
                xcf: s(Functional::Xcf)? / xcf_scale,
                field: s(Functional::Field)? / field_scale,
            })
        })
        .collect::<Result<_>>()?;

    Ok(PhaseReport {
        masks,
        seed,
        max_acf_deviation,
        max_transfer_deviation,
        reference_transfer: dn0,
        sensitivity,
    })
}
