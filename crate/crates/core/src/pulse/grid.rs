use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform angular-frequency grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, n_points: usize) -> Result<Self> {
        validate_uniform(omega_min, omega_max, n_points, "frequency")?;
        Ok(Self {
            omega_min,
            omega_max,
            n_points,
        })
    }

    pub fn centered(center: f64, half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, n_points)
    }

    /// Default grid for a chirped Gaussian: ±10 bandwidths around the
    /// carrier, with the point count raised until the period of the
    /// discrete spectrum (2π/dω) is at least twice the default time window
    /// of ±8 τ_ch, so that the discrete transform does not alias.
    pub fn for_pulse(bandwidth: f64, chirp: f64, carrier: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::param("bandwidth", "must be positive and finite"));
        }
        let half_width = 10.0 * bandwidth;
        let tau_ch = chirped_duration(bandwidth, chirp);
        let required_period = 2.0 * 16.0 * tau_ch;
        let max_spacing = 2.0 * std::f64::consts::PI / required_period;
        let min_intervals = (2.0 * half_width / max_spacing).ceil() as usize;
        let intervals = min_intervals.max(4096).next_power_of_two();
        Self::centered(carrier, half_width, intervals + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.omega_min + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    /// Trapezoid weight of point `j` (without the spacing factor).
    pub fn trapezoid_weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.n_points {
            0.5
        } else {
            1.0
        }
    }
}

/// Uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Result<Self> {
        validate_uniform(t_min, t_max, n_points, "time")?;
        Ok(Self {
            t_min,
            t_max,
            n_points,
        })
    }

    pub fn centered(half_span: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_span, half_span, n_points)
    }

    /// Analysis grid: `window` chirped durations on each side of the pulse
    /// centre, `n_points` samples.
    pub fn for_pulse(bandwidth: f64, chirp: f64, window: f64, n_points: usize) -> Result<Self> {
        Self::centered(window * chirped_duration(bandwidth, chirp), n_points)
    }

    /// Grid for RK4 propagation: spacing is half of the step so that the
    /// stage midpoints fall on samples. The step is shrunk, if needed, to
    /// tile `[-half_span, half_span]` exactly; the point count is odd.
    pub fn for_propagation(half_span: f64, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0 && max_step.is_finite()) {
            return Err(Error::param("rk4_step", "must be positive and finite"));
        }
        let steps = (2.0 * half_span / max_step).ceil() as usize;
        Self::centered(half_span, 2 * steps.max(1) + 1)
    }

    /// The time grid conjugate to `freq` under the discrete transform:
    /// N = N_ω samples spaced by 2π / (N_ω dω), covering exactly one period
    /// of the discrete spectrum and centred on t = 0.
    pub fn periodic_conjugate(freq: &FrequencyGrid) -> Result<Self> {
        let n = freq.n_points;
        let dt = 2.0 * std::f64::consts::PI / (n as f64 * freq.spacing());
        let t_min = -((n / 2) as f64) * dt;
        Self::new(t_min, t_min + (n - 1) as f64 * dt, n)
    }

    pub fn spacing(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.t_min + k as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.point(k))
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn span(&self) -> f64 {
        self.t_max - self.t_min
    }

    /// Nearest sample index to `t`, if `t` lies on the grid within 1e-6 of
    /// the spacing.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = (t - self.t_min) / self.spacing();
        let k = x.round();
        if k < 0.0 || k as usize >= self.n_points || (x - k).abs() > 1e-6 {
            None
        } else {
            Some(k as usize)
        }
    }
}

/// τ_ch = τ_0 √(1 + 4χ²/τ_0⁴) with τ_0 = 1/Δω.
pub fn chirped_duration(bandwidth: f64, chirp: f64) -> f64 {
    let tau0 = 1.0 / bandwidth;
    tau0 * (1.0 + 4.0 * chirp * chirp / tau0.powi(4)).sqrt()
}

fn validate_uniform(min: f64, max: f64, n: usize, what: &str) -> Result<()> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidGrid(format!("{what} bounds must be finite")));
    }
    if min >= max {
        return Err(Error::InvalidGrid(format!(
            "{what} grid needs min < max, got [{min}, {max}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "{what} grid needs at least 2 points, got {n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(FrequencyGrid::new(1.0, 1.0, 10).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(2.0, -2.0, 10).is_err());
        assert!(TimeGrid::new(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn chirped_duration_table_values() {
        assert_eq!(chirped_duration(1.0, 0.0), 1.0);
        let tau = chirped_duration(1.0, 80.0);
        assert!((tau - (1.0f64 + 4.0 * 6400.0).sqrt()).abs() < 1e-12);
        assert!((tau - 160.0).abs() < 0.01);
    }

    #[test]
    fn default_frequency_grid_avoids_aliasing_over_the_window() {
        let g = FrequencyGrid::for_pulse(1.0, 80.0, 0.0).unwrap();
        let period = 2.0 * std::f64::consts::PI / g.spacing();
        assert!(period >= 32.0 * chirped_duration(1.0, 80.0));
        assert!((g.omega_min + 10.0).abs() < 1e-12 && (g.omega_max - 10.0).abs() < 1e-12);
        let unchirped = FrequencyGrid::for_pulse(1.0, 0.0, 0.0).unwrap();
        assert_eq!(unchirped.n_points, 4097);
    }

    #[test]
    fn propagation_grid_has_half_step_spacing() {
        let g = TimeGrid::for_propagation(10.0, 0.3).unwrap();
        assert_eq!(g.n_points % 2, 1);
        let step = 2.0 * g.spacing();
        assert!(step <= 0.3 + 1e-15);
        assert!((g.t_min + 10.0).abs() < 1e-15 && (g.t_max - 10.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_conjugate_grid_satisfies_dft_relation() {
        let f = FrequencyGrid::centered(0.0, 10.0, 513).unwrap();
        let t = TimeGrid::periodic_conjugate(&f).unwrap();
        let product = f.spacing() * t.spacing() * t.n_points as f64;
        assert!((product - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
