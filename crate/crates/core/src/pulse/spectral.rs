use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{chirped_duration, FrequencyGrid};
use crate::{Error, Result, C64};

/// Spectral norm tolerance after synthesis.
pub const NORM_TOLERANCE: f64 = 1e-8;
/// Norm deficit above which a frequency grid is rejected as too narrow.
pub const NORM_DEFICIT_LIMIT: f64 = 1e-6;

/// Parameters of a chirped Gaussian pulse: bandwidth Δω, quadratic
/// spectral phase χ and carrier ω_L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpedGaussian {
    pub bandwidth: f64,
    pub chirp: f64,
    pub carrier: f64,
}

impl ChirpedGaussian {
    pub fn new(bandwidth: f64, chirp: f64, carrier: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::param("bandwidth", "must be positive and finite"));
        }
        if !chirp.is_finite() {
            return Err(Error::param("chirp", "must be finite"));
        }
        if !carrier.is_finite() {
            return Err(Error::param("carrier", "must be finite"));
        }
        Ok(Self {
            bandwidth,
            chirp,
            carrier,
        })
    }

    pub fn with_chirp(self, chirp: f64) -> Self {
        Self { chirp, ..self }
    }

    /// τ_0 = 1/Δω.
    pub fn unchirped_duration(&self) -> f64 {
        1.0 / self.bandwidth
    }

    /// ω_ch = √(1 + 4χ²/τ_0⁴).
    pub fn stretch(&self) -> f64 {
        let tau0 = self.unchirped_duration();
        (1.0 + 4.0 * self.chirp * self.chirp / tau0.powi(4)).sqrt()
    }

    /// τ_ch = ω_ch τ_0.
    pub fn duration(&self) -> f64 {
        chirped_duration(self.bandwidth, self.chirp)
    }

    /// Closed-form spectral amplitude π^(-1/4) Δω^(-1/2) exp(-(ω-ω_L)²/(2Δω²)).
    pub fn amplitude(&self, omega: f64) -> f64 {
        let x = (omega - self.carrier) / self.bandwidth;
        PI.powf(-0.25) / self.bandwidth.sqrt() * (-0.5 * x * x).exp()
    }

    /// Closed-form spectral phase χ(ω-ω_L)².
    pub fn phase(&self, omega: f64) -> f64 {
        let nu = omega - self.carrier;
        self.chirp * nu * nu
    }

    /// Closed-form time-domain field for the transform convention
    /// ε(t) = ∫ ε̃(ω) e^{-iωt} dω:
    ///
    /// ε(t) = √(2π) π^(-1/4) (τ_0 - 2iχ/τ_0)^(-1/2)
    ///        · exp(-(1/2 + iχ/τ_0²)(t/τ_ch)²) · e^{-iω_L t}
    ///
    /// The √(2π) in front is the constant fixed by this convention; the
    /// remaining expression is the usual chirped-Gaussian closed form.
    pub fn analytic_field(&self, t: f64) -> C64 {
        let tau0 = self.unchirped_duration();
        let tau_ch = self.duration();
        let denom = C64::new(tau0, -2.0 * self.chirp / tau0).sqrt();
        let prefactor = (2.0 * PI).sqrt() * PI.powf(-0.25) / denom;
        let x = t / tau_ch;
        let exponent = -C64::new(0.5, self.chirp / (tau0 * tau0)) * (x * x);
        prefactor * exponent.exp() * C64::from_polar(1.0, -self.carrier * t)
    }
}

/// Spectral amplitude Ã(ω) ≥ 0 and phase φ̃(ω) sampled on a grid, with the
/// parameters the pulse was synthesized from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPulse {
    pub grid: FrequencyGrid,
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
    pub carrier: f64,
    pub bandwidth: f64,
    pub chirp: f64,
}

impl SpectralPulse {
    pub fn params(&self) -> ChirpedGaussian {
        ChirpedGaussian {
            bandwidth: self.bandwidth,
            chirp: self.chirp,
            carrier: self.carrier,
        }
    }

    /// ε̃(ω_j) = Ã(ω_j) e^{iφ̃(ω_j)}.
    pub fn spectrum(&self) -> Vec<C64> {
        self.amplitude
            .iter()
            .zip(&self.phase)
            .map(|(&a, &p)| C64::from_polar(a, p))
            .collect()
    }

    /// Trapezoidal ∫|ε̃(ω)|² dω.
    pub fn spectral_norm(&self) -> f64 {
        let dw = self.grid.spacing();
        self.amplitude
            .iter()
            .enumerate()
            .map(|(j, a)| self.grid.trapezoid_weight(j) * a * a)
            .sum::<f64>()
            * dw
    }

    /// Adds `mask` to the spectral phase; the amplitude is untouched.
    pub fn apply_phase_mask(&self, mask: &[f64]) -> Result<SpectralPulse> {
        apply_phase_mask(self, mask)
    }
}

/// Samples the chirped Gaussian on `grid` and checks the unit spectral norm.
pub fn synth_chirped_gaussian(
    bandwidth: f64,
    chirp: f64,
    carrier: f64,
    grid: FrequencyGrid,
) -> Result<SpectralPulse> {
    let params = ChirpedGaussian::new(bandwidth, chirp, carrier)?;
    let required_min = carrier - 8.0 * bandwidth;
    let required_max = carrier + 8.0 * bandwidth;

    let amplitude: Vec<f64> = grid.points().map(|w| params.amplitude(w)).collect();
    let phase: Vec<f64> = grid.points().map(|w| params.phase(w)).collect();
    let pulse = SpectralPulse {
        grid,
        amplitude,
        phase,
        carrier,
        bandwidth,
        chirp,
    };

    let deficit = (1.0 - pulse.spectral_norm()).abs();
    let too_narrow = grid.omega_min > required_min || grid.omega_max < required_max;
    if too_narrow || deficit > NORM_DEFICIT_LIMIT {
        return Err(Error::GridTooNarrow {
            covered_min: grid.omega_min,
            covered_max: grid.omega_max,
            required_min,
            required_max,
            deficit,
        });
    }
    if deficit > NORM_TOLERANCE {
        return Err(Error::InvalidGrid(format!(
            "spectral norm off by {deficit:.3e}; refine the frequency grid"
        )));
    }
    Ok(pulse)
}

pub fn apply_phase_mask(pulse: &SpectralPulse, mask: &[f64]) -> Result<SpectralPulse> {
    if mask.len() != pulse.grid.n_points {
        return Err(Error::GridMismatch(format!(
            "mask has {} entries, pulse grid has {}",
            mask.len(),
            pulse.grid.n_points
        )));
    }
    if let Some(j) = mask.iter().position(|m| !m.is_finite()) {
        return Err(Error::param("mask", format!("entry {j} is not finite")));
    }
    let phase = pulse.phase.iter().zip(mask).map(|(p, m)| p + m).collect();
    Ok(SpectralPulse {
        phase,
        ..pulse.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid10() -> FrequencyGrid {
        // dω = 0.005 puts ω = 1 on a grid point
        FrequencyGrid::centered(0.0, 10.0, 4001).unwrap()
    }

    #[test]
    fn table_one_amplitude_and_phase() {
        let p = synth_chirped_gaussian(1.0, 80.0, 0.0, grid10()).unwrap();
        let centre = p.grid.n_points / 2;
        assert!((p.amplitude[centre] - PI.powf(-0.25)).abs() < 1e-15);
        assert!((p.amplitude[centre] - 0.7511).abs() < 1e-4);
        let j1 = p.grid.index_of_omega(1.0);
        assert!((p.phase[j1] - 80.0).abs() < 1e-9);
    }

    #[test]
    fn unchirped_phase_is_zero_and_amplitude_is_chirp_independent() {
        let p0 = synth_chirped_gaussian(1.0, 0.0, 0.0, grid10()).unwrap();
        assert!(p0.phase.iter().all(|&x| x == 0.0));
        let pp = synth_chirped_gaussian(1.0, 80.0, 0.0, grid10()).unwrap();
        let pn = synth_chirped_gaussian(1.0, -80.0, 0.0, grid10()).unwrap();
        assert_eq!(pp.amplitude, pn.amplitude);
        assert_eq!(pp.amplitude, p0.amplitude);
    }

    #[test]
    fn spectral_norm_is_unity() {
        for &(bw, chirp, carrier) in &[(1.0, 80.0, 0.0), (0.01, 80.0, 10.0), (2.5, -3.0, 1.0)] {
            let grid = FrequencyGrid::centered(carrier, 10.0 * bw, 4097).unwrap();
            let p = synth_chirped_gaussian(bw, chirp, carrier, grid).unwrap();
            assert!((p.spectral_norm() - 1.0).abs() < NORM_TOLERANCE);
        }
    }

    #[test]
    fn narrow_grid_is_rejected_with_required_span() {
        let grid = FrequencyGrid::centered(0.0, 3.0, 4097).unwrap();
        match synth_chirped_gaussian(1.0, 0.0, 0.0, grid) {
            Err(Error::GridTooNarrow {
                required_min,
                required_max,
                ..
            }) => {
                assert_eq!(required_min, -8.0);
                assert_eq!(required_max, 8.0);
            }
            other => panic!("expected GridTooNarrow, got {other:?}"),
        }
    }

    #[test]
    fn phase_mask_adds_to_phase_only() {
        let p = synth_chirped_gaussian(1.0, 80.0, 0.0, grid10()).unwrap();
        let zero = vec![0.0; p.grid.n_points];
        assert_eq!(p.apply_phase_mask(&zero).unwrap(), p);
        let c = vec![0.7; p.grid.n_points];
        let q = p.apply_phase_mask(&c).unwrap();
        assert_eq!(q.amplitude, p.amplitude);
        assert!(q.phase.iter().zip(&p.phase).all(|(a, b)| (a - b - 0.7).abs() < 1e-12));
    }

    #[test]
    fn phase_mask_grid_mismatch_is_rejected() {
        let p = synth_chirped_gaussian(1.0, 80.0, 0.0, grid10()).unwrap();
        assert!(matches!(
            p.apply_phase_mask(&[0.0; 3]),
            Err(Error::GridMismatch(_))
        ));
        let mut bad = vec![0.0; p.grid.n_points];
        bad[5] = f64::INFINITY;
        assert!(p.apply_phase_mask(&bad).is_err());
    }

    impl FrequencyGrid {
        fn index_of_omega(&self, w: f64) -> usize {
            ((w - self.omega_min) / self.spacing()).round() as usize
        }
    }
}
