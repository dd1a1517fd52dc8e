use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Franck–Condon overlaps f_km between ground level k and excited level m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FranckCondon {
    pub f14: f64,
    pub f23: f64,
    pub f24: f64,
    pub f13: f64,
}

impl FranckCondon {
    pub fn zero() -> Self {
        Self {
            f14: 0.0,
            f23: 0.0,
            f24: 0.0,
            f13: 0.0,
        }
    }
}

/// Physical parameters of the two-surface, four-level system. Energies in
/// reciprocal time units (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemModel {
    pub omega_g: f64,
    pub omega_e: f64,
    /// δ = E_e − E_g − ω_L.
    pub detuning: f64,
    pub mu: f64,
    /// Rate multiplying the dissipator.
    pub gamma: f64,
    pub fc: FranckCondon,
}

impl SystemModel {
    /// The reference parameter set: ω_g = 0.5, ω_e = 0.1, δ = 0.2,
    /// f14 = f23 = 0.9, f24 = f13 = 0.1, with μ = 1e-3 and γ = 0.1.
    pub fn table1() -> Self {
        Self {
            omega_g: 0.5,
            omega_e: 0.1,
            detuning: 0.2,
            mu: 1e-3,
            gamma: 0.1,
            fc: FranckCondon {
                f14: 0.9,
                f23: 0.9,
                f24: 0.1,
                f13: 0.1,
            },
        }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_g", self.omega_g),
            ("omega_e", self.omega_e),
            ("detuning", self.detuning),
            ("mu", self.mu),
            ("gamma", self.gamma),
            ("f14", self.fc.f14),
            ("f23", self.fc.f23),
            ("f24", self.fc.f24),
            ("f13", self.fc.f13),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.gamma < 0.0 {
            return Err(Error::param("gamma", format!("must be ≥ 0, got {}", self.gamma)));
        }
        if self.mu < 0.0 {
            return Err(Error::param("mu", format!("must be ≥ 0, got {}", self.mu)));
        }
        Ok(())
    }
}
