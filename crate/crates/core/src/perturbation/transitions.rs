use serde::Serialize;

use crate::quantum::{is_excited, level_index, LindbladGenerator};
use crate::{Error, Op, Result, C64};

/// One ground → excited dipole transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    /// Ground basis index.
    pub a: usize,
    /// Excited basis index.
    pub b: usize,
    /// ⟨b|μ̂|a⟩.
    pub mu_ab: C64,
    /// E_b − E_a.
    pub omega_ba: f64,
    /// Initial weight of ground level a.
    pub p_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionTable {
    pub entries: Vec<Transition>,
}

impl TransitionTable {
    pub fn new(entries: Vec<Transition>) -> Result<Self> {
        let table = Self { entries };
        table.validate()?;
        Ok(table)
    }

    /// All transitions of `gen` out of the ground levels, weighted by the
    /// initial distribution `weights` of (level k, P(k)) pairs.
    pub fn from_generator(gen: &LindbladGenerator, weights: &[(usize, f64)]) -> Result<Self> {
        let h0 = &gen.h0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && h0[(i, j)].norm() > 0.0 {
                    return Err(Error::param("h0", "transition table needs a diagonal H0"));
                }
            }
        }
        let mut p = [0.0; 4];
        for &(level, w) in weights {
            if !(1..=4).contains(&level) || is_excited(level_index(level)) {
                return Err(Error::param(
                    "weights",
                    format!("level {level} is not a ground level"),
                ));
            }
            p[level_index(level)] += w;
        }
        let dipole = gen.dipole();
        let mut entries = Vec::new();
        for a in 2..4 {
            for b in 0..2 {
                entries.push(Transition {
                    a,
                    b,
                    mu_ab: dipole[(b, a)],
                    omega_ba: h0[(b, b)].re - h0[(a, a)].re,
                    p_a: p[a],
                });
            }
        }
        Self::new(entries)
    }

    /// Σ_a P(a) over distinct ground levels.
    pub fn total_weight(&self) -> f64 {
        let mut seen = [None; 4];
        for t in &self.entries {
            seen[t.a] = Some(t.p_a);
        }
        seen.iter().flatten().sum()
    }

    /// ρ0 = Σ_a P(a)|a⟩⟨a|.
    pub fn initial_state(&self) -> Op {
        let mut rho = Op::zeros();
        for t in &self.entries {
            rho[(t.a, t.a)] = C64::new(t.p_a, 0.0);
        }
        rho
    }

    fn validate(&self) -> Result<()> {
        for t in &self.entries {
            if !t.omega_ba.is_finite() || !(0.0..=1.0).contains(&t.p_a) {
                return Err(Error::param(
                    "transition",
                    format!("needs finite ω_ba and P(a) in [0, 1], got {t:?}"),
                ));
            }
            if t.a >= 4 || t.b >= 4 || is_excited(t.a) || !is_excited(t.b) {
                return Err(Error::param("transition", format!("bad level pair {t:?}")));
            }
            if self
                .entries
                .iter()
                .any(|u| u.a == t.a && u.p_a != t.p_a)
            {
                return Err(Error::param("transition", "inconsistent P(a) for one level"));
            }
        }
        let total = self.total_weight();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(
                "weights",
                format!("initial weights must sum to 1, got {total}"),
            ));
        }
        Ok(())
    }
}
