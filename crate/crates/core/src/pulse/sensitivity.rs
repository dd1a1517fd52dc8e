use serde::{Deserialize, Serialize};

use super::correlation::{periodic_autocorrelation, periodic_cross_correlation_with_derivative};
use super::spectral::SpectralPulse;
use super::transform::to_time_domain_periodic;
use crate::{Error, Result, C64};

/// Largest admissible finite-difference step, in radians.
pub const MAX_STEP: f64 = 1e-3;

/// Quantity whose dependence on a single spectral-phase bin is probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    /// C(τ).
    Acf,
    /// D(τ).
    Xcf,
    /// ε(t) itself; the control case.
    Field,
}

/// Centered finite-difference estimate of max_τ |δF(τ)/δφ̃(ω_bin)|.
///
/// The phase of bin `bin` is displaced by ±h/dω, a discrete stand-in for
/// h·δ(ω − ω_bin). Fields and correlations are evaluated over one period
/// of the discrete spectrum, where a single-bin perturbation is exactly
/// representable (it does not decay in time).
pub fn phase_sensitivity(
    pulse: &SpectralPulse,
    functional: Functional,
    bin: usize,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h <= MAX_STEP) {
        return Err(Error::param(
            "h",
            format!("finite-difference step must lie in (0, {MAX_STEP}], got {h}"),
        ));
    }
    let n = pulse.grid.n_points;
    if bin >= n {
        return Err(Error::OutOfRange { index: bin, len: n });
    }
    let kick = h / pulse.grid.spacing();
    let mut mask = vec![0.0; n];
    mask[bin] = kick;
    let plus = evaluate(&pulse.apply_phase_mask(&mask)?, functional)?;
    mask[bin] = -kick;
    let minus = evaluate(&pulse.apply_phase_mask(&mask)?, functional)?;
    let diff = plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(diff / (2.0 * h))
}

/// Samples of the functional for the unperturbed pulse, on the same
/// periodic grid `phase_sensitivity` uses.
pub(crate) fn evaluate(pulse: &SpectralPulse, functional: Functional) -> Result<Vec<C64>> {
    let field = to_time_domain_periodic(pulse)?;
    Ok(match functional {
        Functional::Acf => periodic_autocorrelation(&field).values,
        Functional::Xcf => periodic_cross_correlation_with_derivative(&field).values,
        Functional::Field => field.values,
    })
}

/// max |F| of the unperturbed functional.
pub fn functional_scale(pulse: &SpectralPulse, functional: Functional) -> Result<f64> {
    Ok(evaluate(pulse, functional)?
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{synth_chirped_gaussian, FrequencyGrid};

    fn pulse() -> SpectralPulse {
        let g = FrequencyGrid::centered(0.0, 10.0, 1025).unwrap();
        synth_chirped_gaussian(1.0, 3.0, 0.0, g).unwrap()
    }

    #[test]
    fn step_and_bin_are_validated() {
        let p = pulse();
        assert!(phase_sensitivity(&p, Functional::Acf, 3, 0.0).is_err());
        assert!(phase_sensitivity(&p, Functional::Acf, 3, 2e-3).is_err());
        assert!(matches!(
            phase_sensitivity(&p, Functional::Acf, 1025, 1e-4),
            Err(Error::OutOfRange { index: 1025, len: 1025 })
        ));
    }

    #[test]
    fn correlations_are_blind_but_field_is_not() {
        let p = pulse();
        let centre = 512;
        let acf = phase_sensitivity(&p, Functional::Acf, centre, 1e-4).unwrap();
        let xcf = phase_sensitivity(&p, Functional::Xcf, centre + 40, 1e-4).unwrap();
        assert!(acf < 1e-6 * functional_scale(&p, Functional::Acf).unwrap());
        assert!(xcf < 1e-6 * functional_scale(&p, Functional::Xcf).unwrap());
        // δε/δφ̃ = iε̃(ω)e^{-iωt}: the estimate approaches Ã(ω_bin)
        let field = phase_sensitivity(&p, Functional::Field, centre, 1e-4).unwrap();
        let kick = 1e-4 / p.grid.spacing();
        let expect = p.amplitude[centre] * kick.sin() / kick;
        assert!((field - expect).abs() < 1e-9 * expect, "{field} vs {expect}");
    }
}
