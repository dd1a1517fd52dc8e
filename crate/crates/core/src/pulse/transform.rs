use std::borrow::Cow;
use std::f64::consts::{PI, TAU};

use rustfft::FftPlanner;

use super::grid::{FrequencyGrid, TimeGrid};
use super::spectral::SpectralPulse;
use crate::{Error, Result, C64};

/// Relative amplitude the field must fall below at both grid ends.
pub const BOUNDARY_DECAY: f64 = 1e-12;

/// Complex field samples on a uniform time grid.
///
/// `derivative`, when present, holds dε/dt obtained spectrally from the same
/// spectrum as `values`. Fields built from raw samples fall back to an FFT
/// derivative of the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeField {
    pub grid: TimeGrid,
    pub values: Vec<C64>,
    pub derivative: Option<Vec<C64>>,
    pub carrier: f64,
}

impl TimeField {
    pub fn from_samples(grid: TimeGrid, values: Vec<C64>, carrier: f64) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {}",
                values.len(),
                grid.n_points
            )));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::param("field", format!("sample {k} is not finite")));
        }
        Ok(Self {
            grid,
            values,
            derivative: None,
            carrier,
        })
    }

    /// Identically zero field.
    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.n_points],
            derivative: Some(vec![C64::new(0.0, 0.0); grid.n_points]),
            carrier: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// ∫|ε(t)|² dt (trapezoid).
    pub fn energy(&self) -> f64 {
        let n = self.values.len();
        let dt = self.grid.spacing();
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 || k + 1 == n { 0.5 } else { 1.0 } * v.norm_sqr())
            .sum::<f64>()
            * dt
    }

    /// Checks that |ε| at both ends is below `BOUNDARY_DECAY` of its maximum.
    pub fn check_boundary_decay(&self) -> Result<()> {
        let peak = self.max_abs();
        if peak == 0.0 {
            return Ok(());
        }
        let first = self.values[0].norm() / peak;
        let last = self.values[self.values.len() - 1].norm() / peak;
        if first > BOUNDARY_DECAY || last > BOUNDARY_DECAY {
            return Err(Error::TimeGridTooShort(format!(
                "|ε| at the grid ends is {:.3e} / {:.3e} of its peak (needs < {BOUNDARY_DECAY:.0e}) on [{}, {}]",
                first, last, self.grid.t_min, self.grid.t_max
            )));
        }
        Ok(())
    }

    /// dε/dt: the stored spectral derivative, or an FFT derivative of the
    /// samples treated as one period.
    pub fn derivative(&self) -> Cow<'_, [C64]> {
        match &self.derivative {
            Some(d) => Cow::Borrowed(d),
            None => Cow::Owned(fft_derivative(&self.values, self.grid.spacing())),
        }
    }

    /// Rotating-frame envelope Λ(t) = ε(t) e^{iω_L t}, with its derivative
    /// Λ' = (ε' + iω_L ε) e^{iω_L t}. The result has zero carrier.
    pub fn envelope(&self) -> TimeField {
        if self.carrier == 0.0 {
            return self.clone();
        }
        let w = self.carrier;
        let rot: Vec<C64> = self
            .grid
            .points()
            .map(|t| C64::from_polar(1.0, w * t))
            .collect();
        let values: Vec<C64> = self.values.iter().zip(&rot).map(|(v, r)| v * r).collect();
        let deriv = self.derivative();
        let derivative = deriv
            .iter()
            .zip(&self.values)
            .zip(&rot)
            .map(|((d, v), r)| (d + C64::new(0.0, w) * v) * r)
            .collect();
        TimeField {
            grid: self.grid,
            values,
            derivative: Some(derivative),
            carrier: 0.0,
        }
    }
}

/// ε(t) = ∫ ε̃(ω) e^{-iωt} dω on `tgrid`, by trapezoidal quadrature over the
/// pulse's frequency grid (evaluated with a chirp-z transform). The
/// derivative is obtained the same way from (−iω) ε̃(ω).
///
/// The grid must extend at least ±6 τ_ch around the pulse centre and the
/// result must decay to `BOUNDARY_DECAY` at both ends.
pub fn to_time_domain(pulse: &SpectralPulse, tgrid: TimeGrid) -> Result<TimeField> {
    let tau_ch = pulse.params().duration();
    let need = 6.0 * tau_ch;
    if tgrid.t_min > -need || tgrid.t_max < need {
        return Err(Error::TimeGridTooShort(format!(
            "grid [{}, {}] must cover ±6 τ_ch = ±{need}",
            tgrid.t_min, tgrid.t_max
        )));
    }
    let field = transform_unchecked(pulse, tgrid);
    field.check_boundary_decay()?;
    Ok(field)
}

/// Same quadrature as [`to_time_domain`] on the one-period conjugate grid
/// of the pulse's frequency grid, where it reduces to a plain DFT. No decay
/// requirement: fields with arbitrary (e.g. per-bin random) spectral phase
/// are periodic on this grid.
pub fn to_time_domain_periodic(pulse: &SpectralPulse) -> Result<TimeField> {
    let tgrid = TimeGrid::periodic_conjugate(&pulse.grid)?;
    Ok(transform_unchecked(pulse, tgrid))
}

pub(crate) fn transform_unchecked(pulse: &SpectralPulse, tgrid: TimeGrid) -> TimeField {
    let spectrum = pulse.spectrum();
    let (values, derivative) = inverse_transform(&pulse.grid, &spectrum, &tgrid);
    TimeField {
        grid: tgrid,
        values,
        derivative: Some(derivative),
        carrier: pulse.carrier,
    }
}

/// Evaluates Σ_j w_j ε̃_j e^{-iω_j t_k} dω and the same sum weighted by
/// (−iω_j), for all k.
fn inverse_transform(
    fgrid: &FrequencyGrid,
    spectrum: &[C64],
    tgrid: &TimeGrid,
) -> (Vec<C64>, Vec<C64>) {
    let dw = fgrid.spacing();
    let dt = tgrid.spacing();
    let w0 = fgrid.omega_min;
    let t0 = tgrid.t_min;

    // e^{-iω_j t_k} = e^{-iω_0 t_k} · e^{-i j dω t_0} · e^{-i jk dω dt}
    let weighted: Vec<C64> = spectrum
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let shift = expi_neg(dw * t0, j as f64);
            e * (fgrid.trapezoid_weight(j) * dw) * shift
        })
        .collect();
    let weighted_deriv: Vec<C64> = weighted
        .iter()
        .enumerate()
        .map(|(j, b)| b * C64::new(0.0, -fgrid.point(j)))
        .collect();

    let alpha = dw * dt;
    let s = chirp_z(&weighted, alpha, tgrid.n_points);
    let sd = chirp_z(&weighted_deriv, alpha, tgrid.n_points);
    let outer: Vec<C64> = tgrid
        .points()
        .map(|t| C64::from_polar(1.0, -w0 * t))
        .collect();
    let values = s.iter().zip(&outer).map(|(a, b)| a * b).collect();
    let deriv = sd.iter().zip(&outer).map(|(a, b)| a * b).collect();
    (values, deriv)
}

/// S_k = Σ_j x_j e^{-iα jk} for k in 0..k_len (Bluestein's chirp-z
/// algorithm, using jk = (j² + k² − (k−j)²)/2).
pub(crate) fn chirp_z(x: &[C64], alpha: f64, k_len: usize) -> Vec<C64> {
    let m = x.len();
    let len = (m + k_len - 1).next_power_of_two();
    let chirp = |n: i64| expi_neg(0.5 * alpha, (n * n) as f64);

    let mut u = vec![C64::new(0.0, 0.0); len];
    for (j, xj) in x.iter().enumerate() {
        u[j] = xj * chirp(j as i64);
    }
    let mut v = vec![C64::new(0.0, 0.0); len];
    for (n, vn) in v.iter_mut().enumerate().take(k_len) {
        *vn = chirp(n as i64).conj();
    }
    for n in 1..m {
        v[len - n] = chirp(n as i64).conj();
    }

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut u);
    fwd.process(&mut v);
    for (a, b) in u.iter_mut().zip(&v) {
        *a *= b;
    }
    inv.process(&mut u);
    let scale = 1.0 / len as f64;
    (0..k_len)
        .map(|k| u[k] * scale * chirp(k as i64))
        .collect()
}

/// Low half of 2π in double-double form.
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// e^{-icn} for integer-valued n, with cn reduced modulo 2π in extended
/// precision. Plain products lose ~1e-10 rad once cn reaches 1e6, which
/// shows up in the far tails of long transforms.
fn expi_neg(c: f64, n: f64) -> C64 {
    let p = c * n;
    let err = c.mul_add(n, -p);
    let k = (p / TAU).round();
    let r = k.mul_add(-TAU, p) - k * TAU_LO + err;
    C64::from_polar(1.0, -r)
}

/// Spectral derivative of periodic samples with spacing `dt`.
fn fft_derivative(values: &[C64], dt: f64) -> Vec<C64> {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (m, b) in buf.iter_mut().enumerate() {
        // forward DFT uses e^{-i 2π mk/n}: sample k ↔ angular frequency
        // ν_m = 2π m/(n dt) with the signal ∝ e^{+iν t}, so d/dt → iν.
        let signed = if 2 * m < n {
            m as f64
        } else if 2 * m == n {
            0.0
        } else {
            m as f64 - n as f64
        };
        let nu = 2.0 * PI * signed / (n as f64 * dt);
        *b *= C64::new(0.0, nu);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|b| b * scale).collect()
}
