//! Command-line front end of the `wfpo` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::{load_config, FrameChoice, RunConfig};
use crate::experiments::{
    perturbative_comparison, prepare_pulse, relaxation_sweep, scaling_sweep, verify_phase,
    SweepResult, SweepSpec, SweepVariable,
};
use crate::output::{resolve_out_dir, Method, MethodRecord, OutputDir, OUT_ENV};
use crate::perturbation::{adiabaticity, energy_absorption, EnergyAbsorption, TRUNCATION};
use crate::pulse::{autocorrelation, cross_correlation_with_derivative, CorrelationTrace};
use crate::quantum::{propagate, DensityMatrix, LindbladGenerator, Target};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "wfpo",
    version,
    about = "Weak-field phase-only control of a four-level open quantum system",
    long_about = "Weak-field phase-only control of a four-level open quantum system.\n\n\
        Every subcommand reads a TOML run configuration (see configs/table1.cfg) and writes \
        CSV traces and JSON summaries, each carrying the resolved configuration, to the \
        output directory: --out, else the config's output.dir, else $WFPO_OUT, else ./out."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate the master equation for one pulse and write the trajectory.
    Simulate(CommonArgs),
    /// Write the field autocorrelation C(τ) and cross-correlation D(τ).
    PulseAcf(CommonArgs),
    /// Check that random spectral phases leave C(τ) and the second-order
    /// transfer unchanged, and probe single-bin phase derivatives.
    VerifyPhase(VerifyArgs),
    /// Chirp-pair sweep over the dipole strength μ with log-log slopes.
    SweepMu(CommonArgs),
    /// Chirp-pair sweep over the relaxation rate γ.
    SweepGamma(CommonArgs),
    /// Full propagation against the second-order ACF transfer over μ.
    ComparePerturbative(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::PulseAcf(_) => "pulse-acf",
            Command::VerifyPhase(_) => "verify-phase",
            Command::SweepMu(_) => "sweep-mu",
            Command::SweepGamma(_) => "sweep-gamma",
            Command::ComparePerturbative(_) => "compare-perturbative",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Simulate(c)
            | Command::PulseAcf(c)
            | Command::SweepMu(c)
            | Command::SweepGamma(c)
            | Command::ComparePerturbative(c) => c,
            Command::VerifyPhase(v) => &v.common,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration file.
    #[arg(value_name = "CONFIG", required_unless_present = "config")]
    pub config_file: Option<PathBuf>,
    /// Run configuration file (alternative to the positional argument).
    #[arg(long = "config", value_name = "PATH", conflicts_with = "config_file")]
    pub config: Option<PathBuf>,
    /// Spectral chirp χ; shadows pulse.chirp.
    #[arg(long, allow_hyphen_values = true)]
    pub chirp: Option<f64>,
    /// Dipole strength μ; shadows model.mu.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Relaxation rate γ; shadows model.gamma.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Observable: excited_surface or level1..level4; shadows experiment.target.
    #[arg(long)]
    pub target: Option<String>,
    /// Maximum number of sweep points run concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Fail if anything would consult a random number generator.
    #[arg(long)]
    pub seedless: bool,
    /// Override any configuration key, e.g. --set grids.stride=10.
    #[arg(long = "set", value_name = "BLOCK.KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of random phase masks; shadows experiment.masks.
    #[arg(long)]
    pub masks: Option<usize>,
    /// Mask seed; shadows experiment.seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// What a successful run reports on stdout.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub subcommand: &'static str,
    pub outputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

impl CommonArgs {
    fn overrides(&self) -> Vec<String> {
        let mut o = self.set.clone();
        let mut push = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                o.push(format!("{key}={v}"));
            }
        };
        push("pulse.chirp", self.chirp.map(|v| format!("{v:?}")));
        push("model.mu", self.mu.map(|v| format!("{v:?}")));
        push("model.gamma", self.gamma.map(|v| format!("{v:?}")));
        push("experiment.target", self.target.as_ref().map(|t| format!("\"{t}\"")));
        push("experiment.jobs", self.jobs.map(|v| v.to_string()));
        o
    }

    fn config_path(&self) -> &Path {
        self.config
            .as_deref()
            .or(self.config_file.as_deref())
            .expect("clap requires a configuration path")
    }

    pub fn load(&self) -> Result<RunConfig> {
        load_config(self.config_path(), &self.overrides())
    }
}

/// Runs one subcommand end to end.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let args = cli.command.common();
    let mut cfg = args.load()?;
    let env = std::env::var(OUT_ENV).ok();
    let dir = resolve_out_dir(args.out.as_deref(), &cfg, env.as_deref());
    cfg.output.dir = Some(dir.display().to_string());
    let out = OutputDir::create(dir, &cfg)?;
    let name = cli.command.name();
    let (outputs, summary) = match &cli.command {
        Command::Simulate(_) => simulate(&cfg, &out)?,
        Command::PulseAcf(_) => pulse_acf(&cfg, &out)?,
        Command::VerifyPhase(v) => verify(&cfg, &out, v)?,
        Command::SweepMu(_) => sweep(&cfg, &out, SweepVariable::Mu)?,
        Command::SweepGamma(_) => sweep(&cfg, &out, SweepVariable::Gamma)?,
        Command::ComparePerturbative(_) => compare(&cfg, &out)?,
    };
    Ok(RunReport {
        subcommand: name,
        outputs,
        summary,
    })
}

type Outcome = Result<(Vec<PathBuf>, serde_json::Value)>;

fn chirp_tag(chirp: f64) -> String {
    format!("chirp{chirp:+}")
}

fn simulate(cfg: &RunConfig, out: &OutputDir) -> Outcome {
    let model = cfg.model();
    let pulse = cfg.pulse()?;
    let prepared = prepare_pulse(&pulse, &cfg.grids)?;
    let (gen, frame) = match cfg.experiment.frame {
        FrameChoice::Rotating => (LindbladGenerator::rotating(&model)?, "rotating"),
        FrameChoice::Lab => (LindbladGenerator::lab(&model, pulse.carrier)?, "lab"),
    };
    let traj = propagate(&gen, &DensityMatrix::ground(), &prepared.field, cfg.grids.stride)?;
    let stem = format!("simulate_{frame}_{}", chirp_tag(pulse.chirp));

    let csv = out.write_csv(
        &format!("{stem}.csv"),
        &["t", "p1", "p2", "p3", "p4", "re_rho_c_trace", "im_rho_c_trace"],
        traj.rows(),
    )?;
    let energy: Option<EnergyAbsorption> = match energy_absorption(&traj, &prepared.field) {
        Ok(e) => Some(e),
        Err(e @ Error::StrideTooCoarse { .. }) => {
            log::warn!("energy bookkeeping skipped: {e}");
            None
        }
        Err(e) => return Err(e),
    };
    let adiabatic = (pulse.carrier != 0.0)
        .then(|| adiabaticity(&prepared.field))
        .transpose()?;
    let final_state = traj.final_state();
    let target = cfg.experiment.target;
    let excited = final_state.population(Target::ExcitedSurface);
    let summary = json!({
        "frame": frame,
        "chirp": pulse.chirp,
        "rk4_step": traj.step,
        "stored_steps": traj.len(),
        "final_populations": final_state.level_populations(),
        "excited_surface": excited,
        "target": target,
        "target_population": final_state.population(target),
        "energy": energy,
        "energy_per_quantum": energy
            .filter(|_| pulse.carrier != 0.0)
            .map(|e| e.delta_e / (pulse.carrier * e.delta_n)),
        "adiabaticity": adiabatic,
        "defects": traj.defects,
    });
    let json_path = out.write_json(&format!("{stem}.json"), &summary)?;
    let params = json!({"chirp": pulse.chirp, "mu": model.mu, "gamma": model.gamma, "frame": frame});
    let mut records = vec![MethodRecord {
        method: Method::Full,
        delta_n: excited,
        delta_e: energy.map(|e| e.delta_e),
        params: params.clone(),
    }];
    if let Some(e) = energy {
        records.push(MethodRecord {
            method: Method::Coherence,
            delta_n: e.delta_n,
            delta_e: Some(e.delta_e),
            params,
        });
    }
    let rec = out.write_records("simulate", &records)?;
    Ok((vec![csv, json_path, rec], summary))
}

fn trace_rows(tr: &CorrelationTrace) -> impl Iterator<Item = [f64; 3]> + '_ {
    tr.lags.iter().zip(&tr.values).map(|(t, v)| [*t, v.re, v.im])
}

fn pulse_acf(cfg: &RunConfig, out: &OutputDir) -> Outcome {
    let pulse = cfg.pulse()?;
    let prepared = prepare_pulse(&pulse, &cfg.grids)?;
    let acf = autocorrelation(&prepared.field)?;
    let xcf = cross_correlation_with_derivative(&prepared.field)?;
    let tag = chirp_tag(pulse.chirp);
    let cols = ["tau", "re", "im"];
    let acf_trim = acf.trimmed(TRUNCATION);
    let xcf_trim = xcf.trimmed(TRUNCATION);
    let a = out.write_csv(&format!("pulse_acf_{tag}.csv"), &cols, trace_rows(&acf_trim))?;
    let d = out.write_csv(&format!("pulse_xcf_{tag}.csv"), &cols, trace_rows(&xcf_trim))?;
    let summary = json!({
        "chirp": pulse.chirp,
        "chirped_duration": pulse.duration(),
        "field_energy": prepared.field.energy(),
        "spectral_norm": prepared.spectral.spectral_norm(),
        "acf_peak": acf.max_abs(),
        "acf_hermitian_defect": acf.hermitian_defect(),
        "xcf_peak": xcf.max_abs(),
        "lags_written": acf_trim.len(),
    });
    let j = out.write_json(&format!("pulse_acf_{tag}.json"), &summary)?;
    Ok((vec![a, d, j], summary))
}

fn verify(cfg: &RunConfig, out: &OutputDir, args: &VerifyArgs) -> Outcome {
    let masks = args.masks.unwrap_or(cfg.experiment.masks);
    let seed = if args.common.seedless {
        None
    } else {
        args.seed.or(cfg.experiment.seed)
    };
    let report = verify_phase(
        &cfg.model(),
        &cfg.pulse()?,
        &cfg.grids,
        masks,
        seed,
        cfg.experiment.bins.as_deref(),
    )?;
    let csv = out.write_csv(
        "verify_phase_sensitivity.csv",
        &["bin", "omega", "acf", "xcf", "field"],
        report
            .sensitivity
            .iter()
            .map(|r| [r.bin as f64, r.omega, r.acf, r.xcf, r.field]),
    )?;
    let summary = json!({
        "masks": report.masks,
        "seed": report.seed,
        "max_acf_deviation": report.max_acf_deviation,
        "max_transfer_deviation": report.max_transfer_deviation,
        "max_correlation_sensitivity": report.max_correlation_sensitivity(),
        "min_field_sensitivity": report.min_field_sensitivity(),
    });
    let j = out.write_json("verify_phase.json", &report)?;
    Ok((vec![csv, j], summary))
}

fn sweep(cfg: &RunConfig, out: &OutputDir, variable: SweepVariable) -> Outcome {
    let spec = SweepSpec {
        variable,
        values: cfg.experiment.sweep_values(variable),
        model: cfg.model(),
        pulse: cfg.pulse()?,
        grids: cfg.grids,
        target: cfg.experiment.target,
        jobs: cfg.experiment.jobs,
    };
    let result: SweepResult = match variable {
        SweepVariable::Mu => scaling_sweep(&spec)?,
        SweepVariable::Gamma => relaxation_sweep(&spec)?,
    };
    let stem = format!("sweep_{}_{}", variable.name(), result.target);
    let csv = out.write_csv(
        &format!("{stem}.csv"),
        &["value", "dn_pos", "dn_neg", "effect"],
        result.records.iter().map(|r| [r.value, r.dn_pos, r.dn_neg, r.effect]),
    )?;
    let j = out.write_json(&format!("{stem}.json"), &result)?;
    let chi = spec.pulse.chirp.abs();
    let records: Vec<MethodRecord> = result
        .records
        .iter()
        .flat_map(|r| {
            [(chi, r.dn_pos), (-chi, r.dn_neg)].map(|(c, dn)| MethodRecord {
                method: Method::Full,
                delta_n: dn,
                delta_e: None,
                params: json!({variable.name(): r.value, "chirp": c, "target": result.target}),
            })
        })
        .collect();
    let rec = out.write_records(&format!("sweep_{}", variable.name()), &records)?;
    let summary = match variable {
        SweepVariable::Mu => {
            let f = result.fits.as_ref();
            let slope = |s: Option<&crate::experiments::SeriesFit>| s.map(|s| s.slope());
            json!({
                "target": result.target,
                "slope_pt_pos": slope(f.and_then(|f| f.pt_pos.as_ref())),
                "slope_pt_neg": slope(f.and_then(|f| f.pt_neg.as_ref())),
                "slope_effect": slope(f.and_then(|f| f.effect.as_ref())),
                "max_half_range_gap": f.and_then(|f| f.max_half_range_gap()),
            })
        }
        SweepVariable::Gamma => json!({
            "target": result.target,
            "monotonicity": result.monotonicity,
        }),
    };
    Ok((vec![csv, j, rec], summary))
}

fn compare(cfg: &RunConfig, out: &OutputDir) -> Outcome {
    let mus = cfg.experiment.sweep_values(SweepVariable::Mu);
    let pulse = cfg.pulse()?;
    let cmp = perturbative_comparison(&cfg.model(), &pulse, &cfg.grids, &mus)?;
    let csv = out.write_csv(
        "compare_perturbative.csv",
        &["mu", "full", "lgks", "unitary", "residual"],
        cmp.records
            .iter()
            .map(|r| [r.mu, r.full, r.lgks, r.unitary, r.residual]),
    )?;
    let j = out.write_json("compare_perturbative.json", &cmp)?;
    let records: Vec<MethodRecord> = cmp
        .records
        .iter()
        .flat_map(|r| {
            let params = json!({"mu": r.mu, "chirp": cmp.chirp, "gamma": cfg.model.gamma});
            [
                (Method::Unitary, r.unitary),
                (Method::Lgks, r.lgks),
                (Method::Full, r.full),
            ]
            .map(|(method, delta_n)| MethodRecord {
                method,
                delta_n,
                delta_e: None,
                params: params.clone(),
            })
        })
        .collect();
    let rec = out.write_records("compare_perturbative", &records)?;
    let summary = json!({
        "residual_slope": cmp.residual_fit.map(|f| f.slope),
        "max_residual": cmp.records.iter().map(|r| r.residual).fold(0.0, f64::max),
    });
    Ok((vec![csv, j, rec], summary))
}

/// Machine-readable error record printed on failure.
pub fn error_record(subcommand: &str, err: &Error) -> serde_json::Value {
    let mut chain = vec![err.to_string()];
    let mut source = std::error::Error::source(err);
    while let Some(s) = source {
        chain.push(s.to_string());
        source = s.source();
    }
    json!({
        "subcommand": subcommand,
        "error": err.kind(),
        "message": format!("{subcommand}: {err}"),
        "causes": &chain[1..],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_chirp_and_overrides() {
        let cli = Cli::parse_from([
            "wfpo", "simulate", "cfg.toml", "--chirp", "-80", "--gamma", "0", "--set",
            "grids.stride=10",
        ]);
        let Command::Simulate(c) = &cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(c.chirp, Some(-80.0));
        assert_eq!(
            c.overrides(),
            vec!["grids.stride=10", "pulse.chirp=-80.0", "model.gamma=0.0"]
        );
        assert_eq!(c.config_path(), Path::new("cfg.toml"));
        let v = Cli::parse_from(["wfpo", "verify-phase", "--config", "x", "--masks", "3", "--seedless"]);
        assert_eq!(v.command.name(), "verify-phase");
        assert!(v.command.common().seedless);
    }

    #[test]
    fn config_is_required() {
        assert!(Cli::try_parse_from(["wfpo", "sweep-mu"]).is_err());
    }

    #[test]
    fn error_records_name_the_kind() {
        let e = Error::Branch {
            branch: "negative chirp",
            source: Box::new(Error::param("x", "bad")),
        };
        let r = error_record("simulate", &e);
        assert_eq!(r["error"], "branch_failed");
        assert_eq!(r["causes"][0], "invalid parameter `x`: bad");
    }
}
