use serde::Serialize;

use crate::pulse::TimeField;
use crate::quantum::{Frame, Trajectory};
use crate::{Error, Result, C64};

/// Relative change of ΔE tolerated when the stored sampling is halved.
pub const STRIDE_TOLERANCE: f64 = 1e-6;

/// Envelope samples below this fraction of the maximum are ignored by
/// [`adiabaticity`].
pub const ENVELOPE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyAbsorption {
    /// 2Re ∫ ε'(t) d(t) dt.
    pub delta_e: f64,
    /// 2Im ∫ ε(t) d(t) dt.
    pub delta_n: f64,
}

/// Absorbed energy and transferred population from the dipole coherence
/// d(t) = tr(μ̂ρ_c(t)) stored along `traj`.
///
/// `field` is the field the trajectory was driven with; in the rotating
/// frame its envelope is used. The integrals use the trapezoid rule over
/// the stored times and are repeated on every other stored sample; a
/// relative change of ΔE above `STRIDE_TOLERANCE` is reported as
/// `StrideTooCoarse`.
pub fn energy_absorption(traj: &Trajectory, field: &TimeField) -> Result<EnergyAbsorption> {
    if traj.len() < 3 {
        return Err(Error::InsufficientPoints(traj.len()));
    }
    let driven = match traj.frame {
        Frame::Rotating => field.envelope(),
        Frame::Lab { .. } => field.clone(),
    };
    let deriv = driven.derivative();
    let mut power = Vec::with_capacity(traj.len());
    let mut rate = Vec::with_capacity(traj.len());
    for (k, &idx) in traj.sample_indices.iter().enumerate() {
        if idx >= driven.len() {
            return Err(Error::GridMismatch(format!(
                "trajectory sample {idx} outside a field of {} points",
                driven.len()
            )));
        }
        let d = traj.dipole_coherence[k];
        power.push(2.0 * (deriv[idx] * d).re);
        rate.push(2.0 * (driven.values[idx] * d).im);
    }

    let all: Vec<usize> = (0..traj.len()).collect();
    let mut every_other: Vec<usize> = (0..traj.len()).step_by(2).collect();
    if *every_other.last().unwrap() != traj.len() - 1 {
        every_other.push(traj.len() - 1);
    }
    let delta_e = trapezoid(&traj.times, &power, &all);
    let coarse = trapezoid(&traj.times, &power, &every_other);
    let scale = delta_e.abs();
    if scale > 0.0 {
        let change = (delta_e - coarse).abs() / scale;
        if change > STRIDE_TOLERANCE {
            return Err(Error::StrideTooCoarse {
                quantity: "ΔE",
                relative_change: change,
                limit: STRIDE_TOLERANCE,
            });
        }
    }
    Ok(EnergyAbsorption {
        delta_e,
        delta_n: trapezoid(&traj.times, &rate, &all),
    })
}

fn trapezoid(t: &[f64], f: &[f64], idx: &[usize]) -> f64 {
    idx.windows(2)
        .map(|w| 0.5 * (t[w[1]] - t[w[0]]) * (f[w[0]] + f[w[1]]))
        .sum()
}

/// max |Λ'(t)/Λ(t)| / |ω_L| over samples where |Λ| exceeds
/// `ENVELOPE_FLOOR` of its maximum.
pub fn adiabaticity(field: &TimeField) -> Result<f64> {
    if field.carrier == 0.0 {
        return Err(Error::param(
            "carrier",
            "adiabaticity is undefined for a zero carrier frequency",
        ));
    }
    let env = field.envelope();
    let peak = env.max_abs();
    if peak == 0.0 {
        return Err(Error::param("field", "envelope vanishes everywhere"));
    }
    let deriv = env.derivative();
    let ratio = env
        .values
        .iter()
        .zip(deriv.iter())
        .filter(|(v, _)| v.norm() > ENVELOPE_FLOOR * peak)
        .map(|(v, d)| (d / v).norm())
        .fold(0.0, f64::max);
    Ok(ratio / field.carrier.abs())
}

/// Field ε(t) = Λ(t) e^{-iω_L t} with a constant envelope.
pub fn continuous_wave(grid: crate::pulse::TimeGrid, amplitude: f64, carrier: f64) -> TimeField {
    let values: Vec<C64> = grid
        .points()
        .map(|t| C64::from_polar(amplitude, -carrier * t))
        .collect();
    let derivative = values.iter().map(|v| v * C64::new(0.0, -carrier)).collect();
    TimeField {
        grid,
        values,
        derivative: Some(derivative),
        carrier,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{synth_chirped_gaussian, to_time_domain, FrequencyGrid, TimeGrid};

    fn gaussian(tau0: f64, carrier: f64) -> TimeField {
        let bw = 1.0 / tau0;
        let fg = FrequencyGrid::for_pulse(bw, 0.0, carrier).unwrap();
        let p = synth_chirped_gaussian(bw, 0.0, carrier, fg).unwrap();
        to_time_domain(&p, TimeGrid::for_pulse(bw, 0.0, 8.0, 16001).unwrap()).unwrap()
    }

    /// For a Gaussian envelope |Λ'/Λ| = t/τ0², largest at the last grid
    /// point where |Λ| stays above the floor.
    fn gaussian_ratio(field: &TimeField, tau0: f64) -> f64 {
        let t_star = tau0 * (2.0 * (1.0 / ENVELOPE_FLOOR).ln()).sqrt();
        let t_max = field
            .grid
            .points()
            .filter(|t| t.abs() < t_star)
            .fold(0.0f64, |m, t| m.max(t.abs()));
        t_max / (tau0 * tau0) / field.carrier
    }

    #[test]
    fn long_pulse_is_adiabatic() {
        let f = gaussian(100.0, 10.0);
        let r = adiabaticity(&f).unwrap();
        assert!((r - gaussian_ratio(&f, 100.0)).abs() < 1e-6 * r, "{r}");
        assert!((r - 5.2565e-3).abs() < 1e-6);
    }

    #[test]
    fn short_pulse_is_not_adiabatic() {
        let f = gaussian(0.1, 1.0);
        let r = adiabaticity(&f).unwrap();
        assert!(r > 1.0);
        assert!((r - gaussian_ratio(&f, 0.1)).abs() < 1e-6 * r);
    }

    #[test]
    fn constant_envelope_and_zero_carrier() {
        let cw = continuous_wave(TimeGrid::centered(5.0, 101).unwrap(), 0.3, 2.0);
        assert!(adiabaticity(&cw).unwrap() < 1e-15);
        let base = gaussian(1.0, 0.0);
        assert!(adiabaticity(&base).is_err());
    }
}
