//! C interface to `wfpo-core`.
//!
//! Every function returns a [`WfpoStatus`]. On failure the message is
//! available from [`wfpo_last_error_message`] on the same thread. Handles
//! are opaque and owned by the caller, who releases them with the matching
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wfpo_core::experiments::{self, GridParams};
use wfpo_core::perturbation::{delta_n_lgks, LiouvillianPropagator, TransitionTable};
use wfpo_core::pulse::{autocorrelation, ChirpedGaussian, CorrelationTrace};
use wfpo_core::quantum::{FranckCondon, LindbladGenerator, SystemModel, Target, Trajectory};
use wfpo_core::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WfpoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    Panic = 4,
}

/// Propagation frame for [`wfpo_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WfpoFrame {
    Rotating = 0,
    /// Keeps the optical carrier of the pulse.
    Lab = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WfpoModelParams {
    pub omega_g: f64,
    pub omega_e: f64,
    pub detuning: f64,
    pub mu: f64,
    pub gamma: f64,
    pub f14: f64,
    pub f23: f64,
    pub f24: f64,
    pub f13: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WfpoPulseParams {
    pub bandwidth: f64,
    pub chirp: f64,
    pub carrier: f64,
}

/// Discretization. Zero `rk4_step` or `freq_points` selects the default.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WfpoGridParams {
    pub window: f64,
    pub rk4_step: f64,
    pub stride: usize,
    pub freq_half_width: f64,
    pub freq_points: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WfpoChirpEffect {
    pub dn_pos: f64,
    pub dn_neg: f64,
    pub effect: f64,
}

/// Validated system model.
pub struct WfpoModel(SystemModel);

/// Stored states of one propagation.
pub struct WfpoTrajectory(Trajectory);

/// Complex correlation trace on a lag grid.
pub struct WfpoTrace(CorrelationTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> WfpoStatus {
    match err {
        Error::InvariantViolation { .. }
        | Error::AxiomViolation { .. }
        | Error::StrideTooCoarse { .. }
        | Error::WeakFieldViolation { .. }
        | Error::TruncatedTrace { .. }
        | Error::InsufficientPoints(_) => WfpoStatus::NumericalFailure,
        Error::Branch { source, .. } => status_of(source),
        _ => WfpoStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WfpoStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WfpoStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            WfpoStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            let mut msg = e.to_string();
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                msg.push_str(&format!(": {s}"));
                src = s.source();
            }
            set_error(msg);
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            WfpoStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn deref_mut<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

fn pulse_of(p: &WfpoPulseParams) -> Result<ChirpedGaussian, Failure> {
    Ok(ChirpedGaussian::new(p.bandwidth, p.chirp, p.carrier)?)
}

fn grids_of(g: &WfpoGridParams) -> Result<GridParams, Failure> {
    let grids = GridParams {
        window: g.window,
        rk4_step: (g.rk4_step != 0.0).then_some(g.rk4_step),
        stride: g.stride,
        freq_half_width: g.freq_half_width,
        freq_points: (g.freq_points != 0).then_some(g.freq_points),
    };
    grids.validate()?;
    Ok(grids)
}

fn target_of(level: u32) -> Result<Target, Failure> {
    let t = match level {
        0 => Target::ExcitedSurface,
        k => Target::Level(k as usize),
    };
    t.validate()?;
    Ok(t)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn wfpo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be null or point to writable memory for one struct.
#[no_mangle]
pub unsafe extern "C" fn wfpo_model_params_table1(out: *mut WfpoModelParams) -> WfpoStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let m = SystemModel::table1();
        *out = WfpoModelParams {
            omega_g: m.omega_g,
            omega_e: m.omega_e,
            detuning: m.detuning,
            mu: m.mu,
            gamma: m.gamma,
            f14: m.fc.f14,
            f23: m.fc.f23,
            f24: m.fc.f24,
            f13: m.fc.f13,
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be null or point to writable memory for one struct.
#[no_mangle]
pub unsafe extern "C" fn wfpo_grid_params_default(out: *mut WfpoGridParams) -> WfpoStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let g = GridParams::default();
        *out = WfpoGridParams {
            window: g.window,
            rk4_step: g.rk4_step.unwrap_or(0.0),
            stride: g.stride,
            freq_half_width: g.freq_half_width,
            freq_points: g.freq_points.unwrap_or(0),
        };
        Ok(())
    })
}

/// # Safety
/// `params` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn wfpo_model_new(
    params: *const WfpoModelParams,
    out: *mut *mut WfpoModel,
) -> WfpoStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let out = deref_mut(out, "out")?;
        let model = SystemModel {
            omega_g: p.omega_g,
            omega_e: p.omega_e,
            detuning: p.detuning,
            mu: p.mu,
            gamma: p.gamma,
            fc: FranckCondon {
                f14: p.f14,
                f23: p.f23,
                f24: p.f24,
                f13: p.f13,
            },
        };
        model.validate()?;
        *out = Box::into_raw(Box::new(WfpoModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or come from [`wfpo_model_new`] and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn wfpo_model_free(model: *mut WfpoModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Propagates from the ground state |1⟩⟨1|.
///
/// # Safety
/// Pointers must be null or valid; `out` receives a new trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn wfpo_simulate(
    model: *const WfpoModel,
    pulse: *const WfpoPulseParams,
    grids: *const WfpoGridParams,
    frame: WfpoFrame,
    out: *mut *mut WfpoTrajectory,
) -> WfpoStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        let pulse = pulse_of(deref(pulse, "pulse")?)?;
        let grids = grids_of(deref(grids, "grids")?)?;
        let out = deref_mut(out, "out")?;
        let traj = match frame {
            WfpoFrame::Rotating => experiments::run_full(model, &pulse, &grids)?,
            WfpoFrame::Lab => experiments::run_lab(model, &pulse, &grids)?.0,
        };
        *out = Box::into_raw(Box::new(WfpoTrajectory(traj)));
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn wfpo_trajectory_len(traj: *const WfpoTrajectory, out: *mut usize) -> WfpoStatus {
    guard(|| {
        *deref_mut(out, "out")? = deref(traj, "traj")?.0.len();
        Ok(())
    })
}

/// Copies the stored times and the four level populations (row-major,
/// levels 1..4 per time) into caller buffers of `len` and `4 * len`
/// doubles. Either buffer may be null to skip it.
///
/// # Safety
/// Non-null buffers must hold the stated number of doubles.
#[no_mangle]
pub unsafe extern "C" fn wfpo_trajectory_copy(
    traj: *const WfpoTrajectory,
    times: *mut f64,
    populations: *mut f64,
    len: usize,
) -> WfpoStatus {
    guard(|| {
        let t = &deref(traj, "traj")?.0;
        if len != t.len() {
            return Err(Error::GridMismatch(format!("buffer of {len} for a trajectory of {}", t.len())).into());
        }
        if !times.is_null() {
            std::slice::from_raw_parts_mut(times, len).copy_from_slice(&t.times);
        }
        if !populations.is_null() {
            let buf = std::slice::from_raw_parts_mut(populations, 4 * len);
            for (row, s) in buf.chunks_exact_mut(4).zip(&t.states) {
                row.copy_from_slice(&s.level_populations());
            }
        }
        Ok(())
    })
}

/// Final population of `target`: 0 for the excited surface, k for level k.
///
/// # Safety
/// `traj` must be null or live; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn wfpo_trajectory_final_population(
    traj: *const WfpoTrajectory,
    target: u32,
    out: *mut f64,
) -> WfpoStatus {
    guard(|| {
        let t = &deref(traj, "traj")?.0;
        let target = target_of(target)?;
        *deref_mut(out, "out")? = t.final_population(target);
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or come from [`wfpo_simulate`] and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn wfpo_trajectory_free(traj: *mut WfpoTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Autocorrelation C(τ) of the pulse's analytic field.
///
/// # Safety
/// Pointers must be null or valid; `out` receives a new trace handle.
#[no_mangle]
pub unsafe extern "C" fn wfpo_pulse_acf(
    pulse: *const WfpoPulseParams,
    grids: *const WfpoGridParams,
    out: *mut *mut WfpoTrace,
) -> WfpoStatus {
    guard(|| {
        let pulse = pulse_of(deref(pulse, "pulse")?)?;
        let grids = grids_of(deref(grids, "grids")?)?;
        let out = deref_mut(out, "out")?;
        let field = experiments::prepare_pulse(&pulse, &grids)?.field;
        *out = Box::into_raw(Box::new(WfpoTrace(autocorrelation(&field)?)));
        Ok(())
    })
}

/// # Safety
/// `trace` must be null or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn wfpo_trace_len(trace: *const WfpoTrace, out: *mut usize) -> WfpoStatus {
    guard(|| {
        *deref_mut(out, "out")? = deref(trace, "trace")?.0.len();
        Ok(())
    })
}

/// Copies lags and the real and imaginary parts into buffers of `len`
/// doubles. Any buffer may be null to skip it.
///
/// # Safety
/// Non-null buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn wfpo_trace_copy(
    trace: *const WfpoTrace,
    lags: *mut f64,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> WfpoStatus {
    guard(|| {
        let c = &deref(trace, "trace")?.0;
        if len != c.len() {
            return Err(Error::GridMismatch(format!("buffer of {len} for a trace of {}", c.len())).into());
        }
        if !lags.is_null() {
            std::slice::from_raw_parts_mut(lags, len).copy_from_slice(&c.lags);
        }
        if !re.is_null() {
            for (d, v) in std::slice::from_raw_parts_mut(re, len).iter_mut().zip(&c.values) {
                *d = v.re;
            }
        }
        if !im.is_null() {
            for (d, v) in std::slice::from_raw_parts_mut(im, len).iter_mut().zip(&c.values) {
                *d = v.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `trace` must be null or come from [`wfpo_pulse_acf`] and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn wfpo_trace_free(trace: *mut WfpoTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Leading-order excited-surface transfer from the pulse's ACF, starting
/// in |1⟩.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn wfpo_delta_n_lgks(
    model: *const WfpoModel,
    pulse: *const WfpoPulseParams,
    grids: *const WfpoGridParams,
    out: *mut f64,
) -> WfpoStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        let pulse = pulse_of(deref(pulse, "pulse")?)?;
        let grids = grids_of(deref(grids, "grids")?)?;
        let out = deref_mut(out, "out")?;
        let acf = autocorrelation(&experiments::prepare_pulse(&pulse, &grids)?.field)?;
        let gen = LindbladGenerator::rotating(model)?;
        let table = TransitionTable::from_generator(&gen, &[(1, 1.0)])?;
        let prop = LiouvillianPropagator::from_generator(&gen);
        *out = delta_n_lgks(&table, &acf, &prop, &gen.dipole())?;
        Ok(())
    })
}

/// Transfers into `target` for +|χ| and −|χ| of the pulse and their
/// difference.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn wfpo_chirp_effect(
    model: *const WfpoModel,
    pulse: *const WfpoPulseParams,
    grids: *const WfpoGridParams,
    target: u32,
    out: *mut WfpoChirpEffect,
) -> WfpoStatus {
    guard(|| {
        let model = &deref(model, "model")?.0;
        let pulse = pulse_of(deref(pulse, "pulse")?)?;
        let grids = grids_of(deref(grids, "grids")?)?;
        let target = target_of(target)?;
        let out = deref_mut(out, "out")?;
        let e = experiments::chirp_effect(model, &pulse, &grids, target)?;
        *out = WfpoChirpEffect {
            dn_pos: e.dn_pos,
            dn_neg: e.dn_neg,
            effect: e.effect,
        };
        Ok(())
    })
}
