use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::RunConfig;
use super::output::{json_bytes, Staging};
use super::{CliError, RATES_HEADER};
use crate::dae::io::{full_state_csv, trajectory_csv, write_system_dir};
use crate::dae::{certify, energy_report, integrate, recover_multiplier, DaeError, EnergyReport, Scheme};
use crate::fem::{Mesh, NormKind};
use crate::linalg::gram_norm;
use crate::problems::convergence::{spatial_study, temporal_study, RatePoint};
use crate::problems::{build_system, BuiltProblem, CertifiedProblem, ProblemError, ProblemInfo, RecipeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Certify,
    Run,
    Convergence,
    Demo,
}

/// Contents of `energy.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub scheme: Scheme,
    pub dt: f64,
    pub steps: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(flatten)]
    pub energy: EnergyReport,
    pub max_u_norm: f64,
    pub max_lambda_norm: f64,
    pub max_recovered_lambda_norm: f64,
    /// `max ‖B uⁿ − g(tⁿ)‖ / (1 + ‖g(tⁿ)‖)` over `n ≥ 1`.
    pub max_constraint_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_velocity_error_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_velocity_error_h1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pressure_error_l2: Option<f64>,
}

pub fn execute(command: Command, config: &RunConfig) -> Result<String, CliError> {
    config.validate().map_err(CliError::Config)?;
    match command {
        Command::Certify => cmd_certify(config),
        Command::Run => cmd_run(config).map(|r| summarize_run(&r)),
        Command::Convergence => cmd_convergence(config),
        Command::Demo => cmd_demo(config),
    }
}

fn mesh_of(info: &ProblemInfo) -> Option<&Mesh> {
    info.stokes()
        .map(|a| a.velocity.mesh().as_ref())
        .or_else(|| info.eddy().map(|a| a.primal.mesh().as_ref()))
}

fn write_exports(config: &RunConfig, built: &BuiltProblem, dir: &Path) -> Result<(), CliError> {
    if config.export_system {
        write_system_dir(&built.system, &dir.join("system"))?;
    }
    if config.export_mesh {
        if let Some(mesh) = mesh_of(&built.info) {
            mesh.export(&dir.join("mesh"), "mesh")?;
        }
    }
    Ok(())
}

/// Certifies the recipe and writes `certificate.json`; fails with exit
/// status 2 when any hypothesis does not hold.
pub fn cmd_certify(config: &RunConfig) -> Result<String, CliError> {
    let built = build_system(&config.recipe)?;
    let certificate = certify(&built.system, &config.tolerances)?;
    let staging = Staging::new(&config.out)?;
    fs::write(staging.path().join("certificate.json"), json_bytes(&certificate))?;
    write_exports(config, &built, staging.path())?;
    staging.commit()?;
    if !certificate.verdict.pass {
        return Err(CliError::CertificationFailed(Box::new(certificate)));
    }
    Ok(format!(
        "{}: certified (n={}, m={}, beta={}, gamma={}, alpha={})",
        certificate.problem,
        certificate.n,
        certificate.m,
        fmt_opt(certificate.beta),
        fmt_opt(certificate.gamma),
        fmt_opt(certificate.alpha)
    ))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.6e}"))
}

/// Certifies and integrates into `dir`. On certification failure only
/// `certificate.json` is written.
fn run_into(config: &RunConfig, dir: &Path) -> Result<RunReport, CliError> {
    let built = build_system(&config.recipe)?;
    write_exports(config, &built, dir)?;
    let problem: CertifiedProblem = match built.certify(&config.tolerances) {
        Ok(p) => p,
        Err(ProblemError::Dae(DaeError::CertificationFailed(c))) => {
            fs::write(dir.join("certificate.json"), json_bytes(&c))?;
            return Err(CliError::CertificationFailed(c));
        }
        Err(e) => return Err(e.into()),
    };
    fs::write(dir.join("certificate.json"), json_bytes(problem.certified.certificate()))?;
    let sys = problem.system();
    let traj = integrate(&problem.certified, config.dt, config.scheme)?;
    let recovered = recover_multiplier(&problem.certified, &traj);
    let energy = energy_report(sys, &traj)?;
    let max_of = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let report = RunReport {
        problem: sys.name().to_string(),
        scheme: traj.scheme,
        dt: traj.dt,
        steps: traj.steps(),
        t_final: sys.t_final(),
        energy,
        max_u_norm: max_of(&mut traj.u.iter().map(|u| gram_norm(sys.mx(), u))),
        max_lambda_norm: max_of(&mut traj.lambda.iter().map(|l| gram_norm(sys.mm(), l))),
        max_recovered_lambda_norm: max_of(&mut recovered.iter().map(|l| gram_norm(sys.mm(), l))),
        max_constraint_residual: traj.max_relative_constraint_residual(sys),
        max_velocity_error_l2: problem.info.max_velocity_error(&traj, NormKind::L2),
        max_velocity_error_h1: problem.info.max_velocity_error(&traj, NormKind::H1),
        max_pressure_error_l2: problem.info.max_pressure_error(&traj),
    };
    fs::write(dir.join("trajectory.csv"), trajectory_csv(sys, &traj))?;
    if config.full_state {
        fs::write(dir.join("full_state.csv"), full_state_csv(&traj))?;
    }
    fs::write(dir.join("energy.json"), json_bytes(&report))?;
    Ok(report)
}

/// Certifies, integrates, and writes `certificate.json`,
/// `trajectory.csv` and `energy.json` (plus optional exports).
pub fn cmd_run(config: &RunConfig) -> Result<RunReport, CliError> {
    let staging = Staging::new(&config.out)?;
    match run_into(config, staging.path()) {
        Ok(report) => {
            staging.commit()?;
            Ok(report)
        }
        Err(e @ CliError::CertificationFailed(_)) => {
            staging.commit()?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

fn summarize_run(r: &RunReport) -> String {
    let mut s = format!(
        "{}: {} steps of {} (dt={}), max|u|_X={:.6e}, max|lambda|_M={:.6e}, empirical_C={}",
        r.problem,
        r.steps,
        r.scheme,
        r.dt,
        r.max_u_norm,
        r.max_lambda_norm,
        fmt_opt(r.energy.empirical_c)
    );
    if let Some(e) = r.max_velocity_error_h1 {
        let _ = write!(s, ", max velocity H1 error={e:.6e}");
    }
    s
}

/// CSV text of a rates table; the rate column is empty on first rows.
pub fn rates_csv(points: &[RatePoint]) -> String {
    let mut out = String::from(RATES_HEADER);
    out.push('\n');
    for p in points {
        let rate = p.rate.map_or_else(String::new, |r| format!("{r:e}"));
        let _ = writeln!(
            out,
            "{},{},{:e},{:e},{:e},{},{:e}",
            p.study, p.k, p.h, p.dt, p.error, rate, p.max_constraint_residual
        );
    }
    out
}

fn rates_text(points: &[RatePoint]) -> String {
    let mut out = format!(
        "{:<9} {:>4} {:>10} {:>12} {:>12} {:>7} {:>12}\n",
        "study", "k", "h", "dt", "error", "rate", "residual"
    );
    for p in points {
        let rate = p.rate.map_or_else(|| "-".into(), |r| format!("{r:.3}"));
        let _ = writeln!(
            out,
            "{:<9} {:>4} {:>10.6} {:>12.4e} {:>12.4e} {:>7} {:>12.2e}",
            p.study, p.k, p.h, p.dt, p.error, rate, p.max_constraint_residual
        );
    }
    out
}

/// Spatial study over `k_list` with `dt = dt_factor·h²`, then a
/// temporal study on `temporal_k`; writes `rates.csv` and `rates.txt`.
pub fn cmd_convergence(config: &RunConfig) -> Result<String, CliError> {
    let recipe = &config.recipe;
    if !recipe.problem.is_stokes() {
        return Err(CliError::Config(format!(
            "convergence needs a recipe with an exact solution (stokes-mms or stokes-nonsolenoidal), got {}",
            recipe.problem
        )));
    }
    let mut points = spatial_study(recipe, &config.k_list, config.dt_factor, config.scheme, &config.tolerances)?;
    if config.temporal_steps.len() >= 2 {
        let dts: Vec<f64> = config
            .temporal_steps
            .iter()
            .map(|&s| recipe.t_final / s as f64)
            .collect();
        points.extend(temporal_study(
            &recipe.clone().with_k(config.temporal_k),
            &dts,
            config.scheme,
            &config.tolerances,
        )?);
    }
    let text = rates_text(&points);
    let staging = Staging::new(&config.out)?;
    fs::write(staging.path().join("rates.csv"), rates_csv(&points))?;
    fs::write(staging.path().join("rates.txt"), &text)?;
    staging.commit()?;
    Ok(text.trim_end().to_string())
}

/// Runs every recipe with the config's parameters, one subdirectory each,
/// and writes `demo.txt` with a line per recipe.
pub fn cmd_demo(config: &RunConfig) -> Result<String, CliError> {
    let staging = Staging::new(&config.out)?;
    let mut summary = String::new();
    for kind in [
        RecipeKind::StokesMms,
        RecipeKind::StokesNonsolenoidal,
        RecipeKind::Eddy2dConductor,
        RecipeKind::SyntheticRandom,
    ] {
        let mut sub = config.clone();
        sub.recipe.problem = kind;
        sub.recipe.validate().map_err(CliError::Config)?;
        let dir = staging.path().join(kind.as_str());
        fs::create_dir_all(&dir)?;
        let report = run_into(&sub, &dir)?;
        summary.push_str(&summarize_run(&report));
        summary.push('\n');
    }
    fs::write(staging.path().join("demo.txt"), &summary)?;
    staging.commit()?;
    Ok(summary.trim_end().to_string())
}
