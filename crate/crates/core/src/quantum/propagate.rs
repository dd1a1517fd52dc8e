use super::generator::{Frame, LindbladGenerator};
use super::state::{Defects, DensityMatrix, Target};
use crate::pulse::TimeField;
use crate::{Error, Op, Result, C64};

/// Upper bound on dt · max(‖H‖, γ) for the fixed-step integrator.
pub const MAX_STEP_RATE: f64 = 0.05;

/// Stored states of a propagation run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Field seen by the generator at each stored time (the envelope in
    /// the rotating frame).
    pub field_samples: Vec<C64>,
    /// tr(μ̂ρ_c) at each stored time.
    pub dipole_coherence: Vec<C64>,
    /// Index of each stored time on the field grid.
    pub sample_indices: Vec<usize>,
    pub frame: Frame,
    /// RK4 step.
    pub step: f64,
    /// Worst invariant defects over the stored states.
    pub defects: Defects,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectories hold at least one state")
    }

    pub fn final_population(&self, target: Target) -> f64 {
        self.final_state().population(target)
    }

    /// Rows (t, p1, p2, p3, p4, re d, im d).
    pub fn rows(&self) -> impl Iterator<Item = [f64; 7]> + '_ {
        self.times
            .iter()
            .zip(&self.states)
            .zip(&self.dipole_coherence)
            .map(|((&t, s), d)| {
                let p = s.level_populations();
                [t, p[0], p[1], p[2], p[3], d.re, d.im]
            })
    }
}

/// Integrates the master equation with classical RK4 over the field grid.
///
/// The field grid spacing is half of the RK4 step: step k uses samples
/// 2k, 2k+1 and 2k+2, so the grid needs an odd number of points. In the
/// rotating frame the field's carrier is stripped first. Every `stride`-th
/// step (and the final one) is stored.
pub fn propagate(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    field: &TimeField,
    stride: usize,
) -> Result<Trajectory> {
    if stride == 0 {
        return Err(Error::param("stride", "must be at least 1"));
    }
    let n = field.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "propagation needs an odd number (≥ 3) of field samples, got {n}"
        )));
    }
    let envelope;
    let samples: &[C64] = match gen.frame {
        Frame::Rotating => {
            envelope = field.envelope();
            &envelope.values
        }
        Frame::Lab { carrier } => {
            if carrier != field.carrier {
                return Err(Error::param(
                    "carrier",
                    format!(
                        "lab-frame generator built for ω_L = {carrier}, field carries {}",
                        field.carrier
                    ),
                ));
            }
            &field.values
        }
    };

    let h = 2.0 * field.grid.spacing();
    let eps_max = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let rate = gen.rate_scale(eps_max);
    if h * rate >= MAX_STEP_RATE {
        return Err(Error::param(
            "rk4_step",
            format!("dt·max(‖H‖, γ) = {:.4} must stay below {MAX_STEP_RATE}", h * rate),
        ));
    }

    let initial = rho0.defects();
    if let Some((invariant, detail)) = initial.violation() {
        return Err(Error::InvariantViolation {
            step: 0,
            invariant,
            detail,
        });
    }

    let steps = (n - 1) / 2;
    let capacity = steps / stride + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        field_samples: Vec::with_capacity(capacity),
        dipole_coherence: Vec::with_capacity(capacity),
        sample_indices: Vec::with_capacity(capacity),
        frame: gen.frame,
        step: h,
        defects: initial,
    };
    let store = |traj: &mut Trajectory, k: usize, rho: &Op| {
        let idx = 2 * k;
        traj.times.push(field.grid.point(idx));
        traj.states.push(DensityMatrix(*rho));
        traj.field_samples.push(samples[idx]);
        traj.dipole_coherence.push(gen.dipole_coherence(rho));
        traj.sample_indices.push(idx);
    };

    let mut rho = rho0.0;
    store(&mut traj, 0, &rho);
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for k in 0..steps {
        let (e0, em, e1) = (samples[2 * k], samples[2 * k + 1], samples[2 * k + 2]);
        let k1 = gen.rhs(&rho, e0);
        let k2 = gen.rhs(&(rho + k1 * half), em);
        let k3 = gen.rhs(&(rho + k2 * half), em);
        let k4 = gen.rhs(&(rho + k3 * full), e1);
        rho += (k1 + (k2 + k3) * two + k4) * sixth;

        let step = k + 1;
        let stored = step % stride == 0 || step == steps;
        let state = DensityMatrix(rho);
        let defects = if stored {
            state.defects()
        } else {
            Defects {
                trace_drift: (state.trace() - 1.0).norm(),
                hermiticity: state.hermiticity_defect(),
                min_eigenvalue: f64::INFINITY,
            }
        };
        if let Some((invariant, detail)) = defects.violation() {
            return Err(Error::InvariantViolation {
                step,
                invariant,
                detail,
            });
        }
        if stored {
            traj.defects = traj.defects.worst(defects);
            store(&mut traj, step, &rho);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::TimeGrid;
    use crate::quantum::SystemModel;

    #[test]
    fn field_free_unrelaxed_state_is_frozen() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1().with_gamma(0.0)).unwrap();
        let field = TimeField::zeros(TimeGrid::for_propagation(5.0, 0.01).unwrap());
        let traj = propagate(&gen, &DensityMatrix::ground(), &field, 10).unwrap();
        assert!(traj.states.iter().all(|s| *s == DensityMatrix::ground()));
        assert_eq!(traj.len(), 101);
        assert_eq!(*traj.times.last().unwrap(), 5.0);
    }

    #[test]
    fn even_grids_and_large_steps_are_rejected() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1()).unwrap();
        let even = TimeField::zeros(TimeGrid::centered(1.0, 10).unwrap());
        assert!(propagate(&gen, &DensityMatrix::ground(), &even, 1).is_err());
        let coarse = TimeField::zeros(TimeGrid::centered(10.0, 21).unwrap());
        assert!(propagate(&gen, &DensityMatrix::ground(), &coarse, 1).is_err());
    }

    #[test]
    fn relaxation_follows_exponential_decay() {
        let gen = LindbladGenerator::rotating(&SystemModel::table1().with_gamma(0.5)).unwrap();
        let field = TimeField::zeros(TimeGrid::new(0.0, 4.0, 801).unwrap());
        let traj = propagate(&gen, &DensityMatrix::pure(4).unwrap(), &field, 1).unwrap();
        let p4 = traj.final_population(Target::Level(4));
        assert!((p4 - (-2.0f64).exp()).abs() < 1e-10);
        assert!((traj.final_population(Target::ExcitedSurface) - 1.0).abs() < 1e-14);
    }
}
