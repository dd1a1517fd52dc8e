use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chirp::{effect_of, ChirpPair};
use super::fit::{fit_loglog_slope, SlopeFit};
use super::setup::GridParams;
use crate::pulse::ChirpedGaussian;
use crate::quantum::{Defects, SystemModel, Target};
use crate::{Error, Result};

/// Largest target transfer a sweep accepts before the perturbative
/// ordering is considered out of regime.
pub const WEAK_FIELD_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Mu,
    Gamma,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Mu => "mu",
            SweepVariable::Gamma => "gamma",
        }
    }

    fn apply(&self, model: &SystemModel, value: f64) -> SystemModel {
        match self {
            SweepVariable::Mu => model.with_mu(value),
            SweepVariable::Gamma => model.with_gamma(value),
        }
    }

    /// μ: 8 log-spaced points over [1e-4, 3e-3]. γ: the γ = 0 baseline
    /// followed by 10 log-spaced points over [1e-3, 1].
    pub fn default_values(&self) -> Vec<f64> {
        match self {
            SweepVariable::Mu => log_spaced(1e-4, 3e-3, 8),
            SweepVariable::Gamma => {
                let mut v = vec![0.0];
                v.extend(log_spaced(1e-3, 1.0, 10));
                v
            }
        }
    }
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// One parameter study: `variable` takes each of `values` while everything
/// else stays fixed; every point is a ±|χ| pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub model: SystemModel,
    pub pulse: ChirpedGaussian,
    pub grids: GridParams,
    pub target: Target,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(Error::param("values", "a sweep needs at least 2 points"));
        }
        if self.values.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater)) {
            return Err(Error::param("values", "must be strictly increasing"));
        }
        let lo = self.values[0];
        let hi = self.values[self.values.len() - 1];
        match self.variable {
            SweepVariable::Mu => {
                if lo.is_nan() || lo <= 0.0 || !hi.is_finite() {
                    return Err(Error::param("values", "μ values must be positive and finite"));
                }
                if hi / lo < 10.0 * (1.0 - 1e-12) {
                    return Err(Error::param("values", "μ values must span at least one decade"));
                }
            }
            SweepVariable::Gamma => {
                if lo.is_nan() || lo < 0.0 || !hi.is_finite() {
                    return Err(Error::param("values", "γ values must be non-negative and finite"));
                }
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::param("jobs", "must be at least 1"));
        }
        self.target.validate()?;
        self.grids.validate()?;
        for &v in &self.values {
            self.variable.apply(&self.model, v).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub value: f64,
    pub dn_pos: f64,
    pub dn_neg: f64,
    /// dn_pos − dn_neg.
    pub effect: f64,
}

/// A log-log fit over the whole sweep and over its lower and upper halves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesFit {
    pub full: SlopeFit,
    pub lower: Option<SlopeFit>,
    pub upper: Option<SlopeFit>,
}

impl SeriesFit {
    fn new(points: &[(f64, f64)]) -> Option<Self> {
        let full = match fit_loglog_slope(points) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("slope fit skipped: {e}");
                return None;
            }
        };
        let half = points.len() / 2;
        let (lower, upper) = if half >= 2 {
            (
                fit_loglog_slope(&points[..half]).ok(),
                fit_loglog_slope(&points[points.len() - half..]).ok(),
            )
        } else {
            (None, None)
        };
        Some(Self { full, lower, upper })
    }

    pub fn slope(&self) -> f64 {
        self.full.slope
    }

    /// |slope(upper half) − slope(lower half)|.
    pub fn half_range_gap(&self) -> Option<f64> {
        Some((self.upper?.slope - self.lower?.slope).abs())
    }
}

/// Slopes of ΔN(+|χ|), ΔN(−|χ|) and |effect| against μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFits {
    pub pt_pos: Option<SeriesFit>,
    pub pt_neg: Option<SeriesFit>,
    pub effect: Option<SeriesFit>,
}

impl ScalingFits {
    fn new(records: &[SweepRecord]) -> Self {
        let series = |f: fn(&SweepRecord) -> f64| {
            let pts: Vec<_> = records.iter().map(|r| (r.value, f(r))).collect();
            SeriesFit::new(&pts)
        };
        Self {
            pt_pos: series(|r| r.dn_pos),
            pt_neg: series(|r| r.dn_neg),
            effect: series(|r| r.effect.abs()),
        }
    }

    /// Largest half-range slope disagreement over the available series.
    pub fn max_half_range_gap(&self) -> Option<f64> {
        [self.pt_pos, self.pt_neg, self.effect]
            .iter()
            .flatten()
            .filter_map(|s| s.half_range_gap())
            .reduce(f64::max)
    }
}

/// Shape of |effect| along a γ sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monotonicity {
    /// Fraction of the positive-γ log range, from its lower end, over which
    /// |effect| does not decrease.
    pub nondecreasing_fraction: f64,
    /// γ at which |effect| is largest.
    pub peak_at: f64,
    pub peak_effect: f64,
    /// |effect| at γ = 0 when the sweep includes it.
    pub baseline_effect: Option<f64>,
    /// Whether every γ > 0 point exceeds the γ = 0 baseline.
    pub enhanced_over_baseline: Option<bool>,
}

impl Monotonicity {
    fn new(records: &[SweepRecord]) -> Option<Self> {
        let baseline = records.iter().find(|r| r.value == 0.0).map(|r| r.effect.abs());
        let positive: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.value > 0.0)
            .map(|r| (r.value, r.effect.abs()))
            .collect();
        if positive.is_empty() {
            return None;
        }
        let run = positive
            .windows(2)
            .take_while(|w| w[1].1 >= w[0].1)
            .count();
        let (lo, hi) = (positive[0].0.ln(), positive[positive.len() - 1].0.ln());
        let nondecreasing_fraction = if hi > lo {
            (positive[run].0.ln() - lo) / (hi - lo)
        } else {
            1.0
        };
        let (peak_at, peak_effect) = positive
            .iter()
            .copied()
            .fold((positive[0].0, f64::NEG_INFINITY), |m, p| if p.1 > m.1 { p } else { m });
        Some(Self {
            nondecreasing_fraction,
            peak_at,
            peak_effect,
            baseline_effect: baseline,
            enhanced_over_baseline: baseline.map(|b| positive.iter().all(|p| p.1 > b)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub target: Target,
    pub records: Vec<SweepRecord>,
    /// Present for μ sweeps.
    pub fits: Option<ScalingFits>,
    /// Present for γ sweeps.
    pub monotonicity: Option<Monotonicity>,
    /// Worst invariant defects over every run of the sweep.
    pub defects: Defects,
}

/// μ sweep with log-log slopes of the transfers and of the chirp effect.
pub fn scaling_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    expect_variable(spec, SweepVariable::Mu)?;
    Ok(sweep_targets(spec, &[spec.target])?.remove(0))
}

/// γ sweep with a monotonicity report for |effect|.
pub fn relaxation_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    expect_variable(spec, SweepVariable::Gamma)?;
    Ok(sweep_targets(spec, &[spec.target])?.remove(0))
}

fn expect_variable(spec: &SweepSpec, v: SweepVariable) -> Result<()> {
    if spec.variable != v {
        return Err(Error::param(
            "variable",
            format!("expected a {} sweep, got {}", v.name(), spec.variable.name()),
        ));
    }
    Ok(())
}

/// Runs the sweep once and reads several targets off the same
/// trajectories; `spec.target` is ignored in favour of `targets`.
pub fn sweep_targets(spec: &SweepSpec, targets: &[Target]) -> Result<Vec<SweepResult>> {
    spec.validate()?;
    for t in targets {
        t.validate()?;
    }
    let pair = ChirpPair::prepare(&spec.pulse, &spec.grids)?;
    let point = |&value: &f64| -> Result<(Vec<SweepRecord>, Defects)> {
        let model = spec.variable.apply(&spec.model, value);
        let (pos, neg) = pair.propagate(&model, spec.grids.stride)?;
        let mut defects = Defects::ideal();
        let mut records = Vec::with_capacity(targets.len());
        for &target in targets {
            let e = effect_of(&pos, &neg, target);
            for dn in [e.dn_pos, e.dn_neg] {
                if dn >= WEAK_FIELD_LIMIT {
                    return Err(Error::WeakFieldViolation {
                        variable: spec.variable.name(),
                        value,
                        delta_n: dn,
                        limit: WEAK_FIELD_LIMIT,
                    });
                }
            }
            defects = defects.worst(e.defects);
            records.push(SweepRecord {
                value,
                dn_pos: e.dn_pos,
                dn_neg: e.dn_neg,
                effect: e.effect,
            });
        }
        Ok((records, defects))
    };
    let points: Vec<(Vec<SweepRecord>, Defects)> = match spec.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::param("jobs", e.to_string()))?
            .install(|| spec.values.par_iter().map(point).collect::<Result<_>>())?,
        None => spec.values.par_iter().map(point).collect::<Result<_>>()?,
    };

    let defects = points
        .iter()
        .fold(Defects::ideal(), |d, p| d.worst(p.1));
    Ok(targets
        .iter()
        .enumerate()
        .map(|(i, &target)| {
            let records: Vec<SweepRecord> = points.iter().map(|p| p.0[i]).collect();
            let (fits, monotonicity) = match spec.variable {
                SweepVariable::Mu => (Some(ScalingFits::new(&records)), None),
                SweepVariable::Gamma => (None, Monotonicity::new(&records)),
            };
            SweepResult {
                variable: spec.variable,
                target,
                records,
                fits,
                monotonicity,
                defects,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(variable: SweepVariable, values: Vec<f64>) -> SweepSpec {
        SweepSpec {
            variable,
            values,
            model: SystemModel::table1(),
            pulse: ChirpedGaussian::new(1.0, 2.0, 0.0).unwrap(),
            grids: GridParams::default(),
            target: Target::ExcitedSurface,
            jobs: Some(1),
        }
    }

    #[test]
    fn log_spacing_hits_both_ends() {
        let v = log_spaced(1e-4, 3e-3, 8);
        assert_eq!(v.len(), 8);
        assert_eq!((v[0], v[7]), (1e-4, 3e-3));
        let r = v[1] / v[0];
        assert!(v.windows(2).all(|w| (w[1] / w[0] - r).abs() < 1e-12));
    }

    #[test]
    fn value_checks() {
        assert!(spec(SweepVariable::Mu, vec![1e-4]).validate().is_err());
        assert!(spec(SweepVariable::Mu, vec![1e-3, 1e-4]).validate().is_err());
        assert!(spec(SweepVariable::Mu, vec![1e-4, 5e-4]).validate().is_err());
        assert!(spec(SweepVariable::Mu, vec![0.0, 1e-3]).validate().is_err());
        assert!(spec(SweepVariable::Gamma, vec![-0.1, 1.0]).validate().is_err());
        assert!(spec(SweepVariable::Gamma, vec![0.0, 0.1]).validate().is_ok());
        assert!(spec(SweepVariable::Mu, vec![1e-4, 1e-3]).validate().is_ok());
        assert!(scaling_sweep(&spec(SweepVariable::Gamma, vec![0.0, 0.1])).is_err());
    }

    #[test]
    fn strong_field_is_rejected() {
        let s = spec(SweepVariable::Mu, vec![1e-2, 0.3]);
        match scaling_sweep(&s) {
            Err(Error::WeakFieldViolation { value, .. }) => assert_eq!(value, 0.3),
            other => panic!("expected weak-field violation, got {other:?}"),
        }
    }

    #[test]
    fn monotonicity_report() {
        let rec = |value: f64, effect: f64| SweepRecord {
            value,
            dn_pos: 0.0,
            dn_neg: 0.0,
            effect,
        };
        let records = [
            rec(0.0, 0.5),
            rec(1e-2, 1.0),
            rec(1e-1, 2.0),
            rec(1.0, -1.5),
        ];
        let m = Monotonicity::new(&records).unwrap();
        assert!((m.nondecreasing_fraction - 0.5).abs() < 1e-12);
        assert_eq!((m.peak_at, m.peak_effect), (1e-1, 2.0));
        assert_eq!(m.enhanced_over_baseline, Some(true));
    }

    #[test]
    fn short_pulse_sweep_is_deterministic_and_ordered() {
        let s = SweepSpec {
            jobs: Some(2),
            ..spec(SweepVariable::Mu, log_spaced(1e-4, 1e-2, 4))
        };
        let a = scaling_sweep(&s).unwrap();
        let b = scaling_sweep(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 4);
        assert!(a.records.windows(2).all(|w| w[0].value < w[1].value));
        let fits = a.fits.unwrap();
        assert!((fits.pt_pos.unwrap().slope() - 2.0).abs() < 0.01);
        assert!(a.defects.within_tolerance());
    }
}
