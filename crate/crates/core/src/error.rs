use std::fmt;

/// The field-free propagator conditions checked before a user-supplied
/// propagator is trusted inside the ACF transfer formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// U(0) is the identity map.
    Identity,
    /// U(t1 + t2) = U(t1) U(t2).
    TimeHomogeneity,
    /// U(t) rho0 = rho0.
    InitialStateInvariance,
    /// tr(P_e U(t) X) = tr(P_e X).
    SurfaceTraceConservation,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Identity => "identity at zero lag",
            Axiom::TimeHomogeneity => "time homogeneity",
            Axiom::InitialStateInvariance => "initial-state invariance",
            Axiom::SurfaceTraceConservation => "surface-trace conservation",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "frequency grid too narrow: covers [{covered_min}, {covered_max}] but the pulse needs at least [{required_min}, {required_max}] (spectral norm deficit {deficit:.3e})"
    )]
    GridTooNarrow {
        covered_min: f64,
        covered_max: f64,
        required_min: f64,
        required_max: f64,
        deficit: f64,
    },

    #[error("time grid too short: {0}")]
    TimeGridTooShort(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("invariant `{invariant}` violated at step {step}: {detail}")]
    InvariantViolation {
        step: usize,
        invariant: &'static str,
        detail: String,
    },

    #[error("correlation trace truncated: |C| at the last lag is {tail:.3e} of its maximum (needs < {threshold:.1e})")]
    TruncatedTrace { tail: f64, threshold: f64 },

    #[error("propagator fails axiom `{axiom}`: {detail}")]
    AxiomViolation { axiom: Axiom, detail: String },

    #[error("trajectory stride too coarse: halving the sampling changes {quantity} by {relative_change:.3e} (relative, limit {limit:.0e})")]
    StrideTooCoarse {
        quantity: &'static str,
        relative_change: f64,
        limit: f64,
    },

    #[error("weak-field guard violated at {variable} = {value}: target transfer {delta_n:.3e} exceeds {limit:.0e}")]
    WeakFieldViolation {
        variable: &'static str,
        value: f64,
        delta_n: f64,
        limit: f64,
    },

    #[error("log-log fit needs at least 2 usable points, got {0}")]
    InsufficientPoints(usize),

    #[error("{branch} branch failed: {source}")]
    Branch {
        branch: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config field `{field}`: {constraint}")]
    ConfigValidation { field: String, constraint: String },

    #[error("RNG required by {0} but the run is seedless")]
    SeedlessViolation(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GridTooNarrow { .. } => "grid_too_narrow",
            Error::TimeGridTooShort(_) => "time_grid_too_short",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::OutOfRange { .. } => "out_of_range",
            Error::InvariantViolation { .. } => "invariant_violation",
            Error::TruncatedTrace { .. } => "truncated_trace",
            Error::AxiomViolation { .. } => "axiom_violation",
            Error::StrideTooCoarse { .. } => "stride_too_coarse",
            Error::WeakFieldViolation { .. } => "weak_field_violation",
            Error::InsufficientPoints(_) => "insufficient_points",
            Error::Branch { .. } => "branch_failed",
            Error::ConfigParse { .. } => "config_parse",
            Error::ConfigValidation { .. } => "config_validation",
            Error::SeedlessViolation(_) => "seedless_violation",
            Error::Io { .. } => "io",
            Error::Serialize(_) => "serialize",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
