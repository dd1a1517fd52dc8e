use rustfft::FftPlanner;

use super::transform::TimeField;
use crate::{Error, Result, C64};

/// Complex correlation values on a uniform, ascending lag grid that is
/// symmetric about zero (for odd lengths).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace {
    pub lags: Vec<f64>,
    pub values: Vec<C64>,
}

impl CorrelationTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lag_spacing(&self) -> f64 {
        self.lags[1] - self.lags[0]
    }

    /// Index of the τ = 0 sample.
    pub fn zero_index(&self) -> usize {
        self.lags
            .iter()
            .position(|&t| t == 0.0)
            .unwrap_or_else(|| {
                let dt = self.lag_spacing();
                (-self.lags[0] / dt).round() as usize
            })
    }

    /// Values for τ ≥ 0, starting at τ = 0.
    pub fn nonnegative(&self) -> &[C64] {
        &self.values[self.zero_index()..]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |C(−τ) − C*(τ)| relative to max|C|.
    pub fn hermitian_defect(&self) -> f64 {
        let z = self.zero_index();
        let reach = z.min(self.len() - 1 - z);
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        (0..=reach)
            .map(|k| (self.values[z - k] - self.values[z + k].conj()).norm())
            .fold(0.0, f64::max)
            / peak
    }

    /// max_τ |a(τ) − b(τ)| / max_τ |a(τ)|.
    pub fn relative_linf_distance(&self, other: &CorrelationTrace) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch(format!(
                "traces of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        let diff = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(diff / self.max_abs())
    }

    /// The symmetric lag window outside of which |C| stays below
    /// `rel`·max|C|.
    pub fn trimmed(&self, rel: f64) -> CorrelationTrace {
        let z = self.zero_index();
        let floor = rel * self.max_abs();
        let reach = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() >= floor)
            .map(|(k, _)| k.abs_diff(z))
            .max()
            .unwrap_or(0);
        let lo = z.saturating_sub(reach);
        let hi = (z + reach).min(self.len() - 1);
        CorrelationTrace {
            lags: self.lags[lo..=hi].to_vec(),
            values: self.values[lo..=hi].to_vec(),
        }
    }
}

/// C(τ) = ∫ ε(t+τ) ε*(t) dt on lags k·dt, |k| ≤ N−1, with zero padding
/// outside the field window.
pub fn autocorrelation(field: &TimeField) -> Result<CorrelationTrace> {
    field.check_boundary_decay()?;
    Ok(linear_correlation(&field.values, &field.values, field.grid.spacing()))
}

/// D(τ) = ∫ ε'(t+τ) ε*(t) dt, with ε' the spectral derivative.
pub fn cross_correlation_with_derivative(field: &TimeField) -> Result<CorrelationTrace> {
    field.check_boundary_decay()?;
    let d = field.derivative();
    Ok(linear_correlation(&d, &field.values, field.grid.spacing()))
}

/// Circular C(τ) over one period of a periodic field (e.g. a field on the
/// conjugate grid of its spectrum). Lags run from −⌊N/2⌋dt upward.
pub fn periodic_autocorrelation(field: &TimeField) -> CorrelationTrace {
    circular_correlation(&field.values, &field.values, field.grid.spacing())
}

/// Circular D(τ) over one period.
pub fn periodic_cross_correlation_with_derivative(field: &TimeField) -> CorrelationTrace {
    let d = field.derivative();
    circular_correlation(&d, &field.values, field.grid.spacing())
}

/// r_k = dt Σ_n a_{n+k} b*_n for k = −(N−1)..=N−1, via zero-padded FFTs.
fn linear_correlation(a: &[C64], b: &[C64], dt: f64) -> CorrelationTrace {
    let n = a.len();
    let len = (2 * n - 1).next_power_of_two();
    let r = correlate_padded(a, b, len);
    let scale = dt / len as f64;
    let count = 2 * n - 1;
    let mut lags = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for k in -(n as i64 - 1)..=(n as i64 - 1) {
        let idx = if k < 0 { len as i64 + k } else { k } as usize;
        lags.push(k as f64 * dt);
        values.push(r[idx] * scale);
    }
    CorrelationTrace { lags, values }
}

fn circular_correlation(a: &[C64], b: &[C64], dt: f64) -> CorrelationTrace {
    let n = a.len();
    let r = correlate_padded(a, b, n);
    let scale = dt / n as f64;
    let half = (n / 2) as i64;
    let mut lags = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for k in -half..(n as i64 - half) {
        let idx = k.rem_euclid(n as i64) as usize;
        lags.push(k as f64 * dt);
        values.push(r[idx] * scale);
    }
    CorrelationTrace { lags, values }
}

/// Unnormalized IFFT(FFT(a)·conj(FFT(b))) at length `len`.
fn correlate_padded(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let mut fa = vec![C64::new(0.0, 0.0); len];
    let mut fb = vec![C64::new(0.0, 0.0); len];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y.conj();
    }
    planner.plan_fft_inverse(len).process(&mut fa);
    fa
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{synth_chirped_gaussian, to_time_domain, FrequencyGrid, TimeGrid};

    fn direct(a: &[C64], b: &[C64], k: i64, dt: f64) -> C64 {
        let n = a.len() as i64;
        (0..n)
            .filter(|&m| m + k >= 0 && m + k < n)
            .map(|m| a[(m + k) as usize] * b[m as usize].conj())
            .sum::<C64>()
            * dt
    }

    #[test]
    fn trimming_keeps_a_symmetric_window() {
        let lags: Vec<f64> = (-10..=10).map(|k| k as f64).collect();
        let values = lags.iter().map(|t| C64::new((-t * t).exp(), 0.0)).collect();
        let tr = CorrelationTrace { lags, values }.trimmed(1e-6);
        assert_eq!(tr.lags.first(), Some(&-3.0));
        assert_eq!(tr.lags.last(), Some(&3.0));
        assert_eq!(tr.values[tr.zero_index()], C64::new(1.0, 0.0));
    }

    #[test]
    fn linear_correlation_matches_direct_sum() {
        let a: Vec<C64> = (0..23).map(|j| C64::new((j as f64).sin(), 0.3 * j as f64)).collect();
        let b: Vec<C64> = (0..23).map(|j| C64::new(1.0 / (1.0 + j as f64), (0.7 * j as f64).cos())).collect();
        let tr = linear_correlation(&a, &b, 0.5);
        for (i, lag) in tr.lags.iter().enumerate() {
            let k = (lag / 0.5).round() as i64;
            assert!((tr.values[i] - direct(&a, &b, k, 0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_field_gives_delta_acf() {
        let grid = TimeGrid::centered(5.0, 11).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); 11];
        v[5] = C64::new(2.0, 1.0);
        let f = TimeField::from_samples(grid, v, 0.0).unwrap();
        let c = autocorrelation(&f).unwrap();
        let z = c.zero_index();
        assert!((c.values[z].re - 5.0).abs() < 1e-12);
        for (k, v) in c.values.iter().enumerate() {
            if k != z {
                assert!(v.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_lag_equals_field_energy() {
        let fg = FrequencyGrid::for_pulse(1.0, 80.0, 0.0).unwrap();
        let p = synth_chirped_gaussian(1.0, 80.0, 0.0, fg).unwrap();
        let tg = TimeGrid::for_pulse(1.0, 80.0, 8.0, 8192).unwrap();
        let f = to_time_domain(&p, tg).unwrap();
        let c = autocorrelation(&f).unwrap();
        let c0 = c.values[c.zero_index()];
        assert!((c0.re - f.energy()).abs() < 1e-10 * f.energy());
        assert!(c0.im.abs() < 1e-10 * c0.re);
        assert!(c.hermitian_defect() < 1e-10);
        assert_eq!(c.lags[0], -tg.span());
    }

    #[test]
    fn circular_correlation_matches_direct_wrapped_sum() {
        let a: Vec<C64> = (0..9).map(|j| C64::new(j as f64, 1.0)).collect();
        let tr = circular_correlation(&a, &a, 1.0);
        for (i, lag) in tr.lags.iter().enumerate() {
            let k = *lag as i64;
            let expect: C64 = (0..9)
                .map(|m| a[((m + k).rem_euclid(9)) as usize] * a[m as usize].conj())
                .sum();
            assert!((tr.values[i] - expect).norm() < 1e-11);
        }
    }
}
