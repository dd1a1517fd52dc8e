use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::operators::level_index;
use crate::{Error, Op, Result, C64};

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

/// Observable whose population is read off a state.
/// Written as `excited_surface` or `level<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Target {
    /// ρ33 + ρ44.
    ExcitedSurface,
    /// ρ_kk for level k ∈ {1, 2, 3, 4}.
    Level(usize),
}

impl Target {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Target::Level(k) if !(1..=4).contains(&k) => {
                Err(Error::param("target", format!("level must be 1..=4, got {k}")))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::ExcitedSurface => f.write_str("excited_surface"),
            Target::Level(k) => write!(f, "level{k}"),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = match s {
            "excited_surface" | "excited" => Target::ExcitedSurface,
            _ => s
                .strip_prefix("level")
                .and_then(|k| k.parse().ok())
                .map(Target::Level)
                .ok_or_else(|| {
                    Error::param("target", format!("expected excited_surface or level1..level4, got `{s}`"))
                })?,
        };
        t.validate()?;
        Ok(t)
    }
}

impl TryFrom<String> for Target {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Target> for String {
    fn from(t: Target) -> String {
        t.to_string()
    }
}

/// Deviations of a state from the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Defects {
    pub trace_drift: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl Defects {
    pub fn ideal() -> Self {
        Self {
            trace_drift: 0.0,
            hermiticity: 0.0,
            min_eigenvalue: f64::INFINITY,
        }
    }

    /// Worst case of two reports.
    pub fn worst(self, other: Defects) -> Self {
        Self {
            trace_drift: self.trace_drift.max(other.trace_drift),
            hermiticity: self.hermiticity.max(other.hermiticity),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }

    pub fn within_tolerance(&self) -> bool {
        self.trace_drift < TRACE_TOLERANCE
            && self.hermiticity < HERMITICITY_TOLERANCE
            && self.min_eigenvalue > -POSITIVITY_TOLERANCE
    }

    /// The first violated invariant, if any.
    pub fn violation(&self) -> Option<(&'static str, String)> {
        if self.trace_drift >= TRACE_TOLERANCE {
            Some(("trace", format!("|tr ρ − 1| = {:.3e}", self.trace_drift)))
        } else if self.hermiticity >= HERMITICITY_TOLERANCE {
            Some(("hermiticity", format!("max|ρ − ρ†| = {:.3e}", self.hermiticity)))
        } else if self.min_eigenvalue <= -POSITIVITY_TOLERANCE {
            Some(("positivity", format!("min eigenvalue {:.3e}", self.min_eigenvalue)))
        } else {
            None
        }
    }
}

/// A 4×4 density matrix in the (|4⟩, |3⟩, |2⟩, |1⟩) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Op);

impl DensityMatrix {
    /// Validates the invariants.
    pub fn new(op: Op) -> Result<Self> {
        let rho = DensityMatrix(op);
        if let Some((invariant, detail)) = rho.defects().violation() {
            return Err(Error::InvariantViolation {
                step: 0,
                invariant,
                detail,
            });
        }
        Ok(rho)
    }

    /// |k⟩⟨k| for level k ∈ {1, 2, 3, 4}.
    pub fn pure(level: usize) -> Result<Self> {
        Target::Level(level).validate()?;
        let mut op = Op::zeros();
        let i = level_index(level);
        op[(i, i)] = C64::new(1.0, 0.0);
        Ok(DensityMatrix(op))
    }

    /// |1⟩⟨1|.
    pub fn ground() -> Self {
        Self::pure(1).expect("level 1 exists")
    }

    pub fn op(&self) -> &Op {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn defects(&self) -> Defects {
        Defects {
            trace_drift: (self.trace() - 1.0).norm(),
            hermiticity: self.hermiticity_defect(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    /// Population of `target`.
    pub fn population(&self, target: Target) -> f64 {
        population(self, target)
    }

    /// ρ_kk for all levels, ordered (p1, p2, p3, p4).
    pub fn level_populations(&self) -> [f64; 4] {
        [1, 2, 3, 4].map(|k| self.0[(level_index(k), level_index(k))].re)
    }
}

pub fn population(rho: &DensityMatrix, target: Target) -> f64 {
    let p = rho.level_populations();
    match target {
        Target::ExcitedSurface => p[2] + p[3],
        Target::Level(k) => p[k - 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_names_round_trip() {
        for t in [Target::ExcitedSurface, Target::Level(1), Target::Level(4)] {
            assert_eq!(t.to_string().parse::<Target>().unwrap(), t);
        }
        assert!("level5".parse::<Target>().is_err());
        assert!("surface".parse::<Target>().is_err());
        assert_eq!(serde_json::to_string(&Target::Level(2)).unwrap(), "\"level2\"");
    }

    #[test]
    fn ground_state_populations() {
        let g = DensityMatrix::ground();
        assert_eq!(g.population(Target::ExcitedSurface), 0.0);
        assert_eq!(g.population(Target::Level(2)), 0.0);
        assert_eq!(g.population(Target::Level(1)), 1.0);
        assert!(g.defects().within_tolerance());
    }

    #[test]
    fn mixed_excited_state_is_fully_excited() {
        let a = DensityMatrix::pure(3).unwrap().0 * C64::new(0.5, 0.0);
        let b = DensityMatrix::pure(4).unwrap().0 * C64::new(0.5, 0.0);
        let rho = DensityMatrix::new(a + b).unwrap();
        assert_eq!(rho.population(Target::ExcitedSurface), 1.0);
    }

    #[test]
    fn invalid_states_are_rejected() {
        assert!(DensityMatrix::pure(5).is_err());
        let mut op = DensityMatrix::ground().0;
        op[(0, 0)] = C64::new(-0.1, 0.0);
        op[(3, 3)] = C64::new(1.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(op),
            Err(Error::InvariantViolation { invariant: "positivity", .. })
        ));
        op = DensityMatrix::ground().0;
        op[(0, 3)] = C64::new(0.0, 1e-6);
        assert!(matches!(
            DensityMatrix::new(op),
            Err(Error::InvariantViolation { invariant: "hermiticity", .. })
        ));
    }
}
