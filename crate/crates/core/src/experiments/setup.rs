use serde::{Deserialize, Serialize};

use crate::pulse::{
    synth_chirped_gaussian, to_time_domain, ChirpedGaussian, FrequencyGrid, SpectralPulse,
    TimeField, TimeGrid,
};
use crate::quantum::{propagate, DensityMatrix, LindbladGenerator, SystemModel, Trajectory};
use crate::{Error, Result};

/// Discretization settings shared by every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridParams {
    /// Half-width of the propagation window in chirped durations.
    pub window: f64,
    /// RK4 step; `None` selects min(0.01, τ_ch/2000).
    pub rk4_step: Option<f64>,
    /// Store every `stride`-th RK4 step.
    pub stride: usize,
    /// Half-width of the frequency grid in bandwidths.
    pub freq_half_width: f64,
    /// Frequency-grid point count; `None` selects the alias-free default.
    pub freq_points: Option<usize>,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            window: 8.0,
            rk4_step: None,
            stride: 100,
            freq_half_width: 10.0,
            freq_points: None,
        }
    }
}

impl GridParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.window.is_finite() && self.window >= 6.0) {
            return Err(Error::param("window", "must be at least 6 chirped durations"));
        }
        if let Some(h) = self.rk4_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::param("rk4_step", "must be positive and finite"));
            }
        }
        if self.stride == 0 {
            return Err(Error::param("stride", "must be at least 1"));
        }
        if !(self.freq_half_width.is_finite() && self.freq_half_width >= 8.0) {
            return Err(Error::param("freq_half_width", "must be at least 8 bandwidths"));
        }
        if matches!(self.freq_points, Some(n) if n < 2) {
            return Err(Error::param("freq_points", "must be at least 2"));
        }
        Ok(())
    }

    pub fn step_for(&self, pulse: &ChirpedGaussian) -> f64 {
        self.rk4_step
            .unwrap_or_else(|| (pulse.duration() / 2000.0).min(0.01))
    }

    pub fn frequency_grid(&self, pulse: &ChirpedGaussian) -> Result<FrequencyGrid> {
        let half = self.freq_half_width * pulse.bandwidth;
        match self.freq_points {
            Some(n) => FrequencyGrid::centered(pulse.carrier, half, n),
            None if self.freq_half_width == 10.0 => {
                FrequencyGrid::for_pulse(pulse.bandwidth, pulse.chirp, pulse.carrier)
            }
            None => {
                let g = FrequencyGrid::for_pulse(pulse.bandwidth, pulse.chirp, pulse.carrier)?;
                let scaled = ((g.n_points - 1) as f64 * self.freq_half_width / 10.0).ceil();
                FrequencyGrid::centered(pulse.carrier, half, scaled as usize + 1)
            }
        }
    }

    pub fn time_grid(&self, pulse: &ChirpedGaussian) -> Result<TimeGrid> {
        TimeGrid::for_propagation(self.window * pulse.duration(), self.step_for(pulse))
    }
}

/// A synthesized pulse and its field on the propagation grid.
#[derive(Debug, Clone)]
pub struct PreparedPulse {
    pub spectral: SpectralPulse,
    pub field: TimeField,
}

pub fn prepare_pulse(pulse: &ChirpedGaussian, grids: &GridParams) -> Result<PreparedPulse> {
    grids.validate()?;
    let spectral = synth_chirped_gaussian(
        pulse.bandwidth,
        pulse.chirp,
        pulse.carrier,
        grids.frequency_grid(pulse)?,
    )?;
    let field = to_time_domain(&spectral, grids.time_grid(pulse)?)?;
    Ok(PreparedPulse { spectral, field })
}

/// Rotating-frame propagation from |1⟩⟨1|.
pub fn run_full(model: &SystemModel, pulse: &ChirpedGaussian, grids: &GridParams) -> Result<Trajectory> {
    let prepared = prepare_pulse(pulse, grids)?;
    let gen = LindbladGenerator::rotating(model)?;
    propagate(&gen, &DensityMatrix::ground(), &prepared.field, grids.stride)
}

/// Lab-frame propagation from |1⟩⟨1|; the field keeps its carrier.
pub fn run_lab(
    model: &SystemModel,
    pulse: &ChirpedGaussian,
    grids: &GridParams,
) -> Result<(Trajectory, PreparedPulse)> {
    let prepared = prepare_pulse(pulse, grids)?;
    let gen = LindbladGenerator::lab(model, pulse.carrier)?;
    let traj = propagate(&gen, &DensityMatrix::ground(), &prepared.field, grids.stride)?;
    Ok((traj, prepared))
}
