//! Command-line front end: certify, run, convergence tables and a demo.
//!
//! Every command reads a [`RunConfig`], computes all of its results in
//! memory or in a staging directory, and publishes the output files only
//! once nothing can fail any more.

mod commands;
mod config;
mod output;

use std::io;

use thiserror::Error;

pub use commands::{cmd_certify, cmd_convergence, cmd_demo, cmd_run, execute, rates_csv, Command, RunReport};
pub use config::RunConfig;
pub use output::Staging;

use crate::dae::io::IoError;
use crate::dae::{Certificate, DaeError, Scheme};
use crate::problems::ProblemError;

/// Header of `rates.csv`.
pub const RATES_HEADER: &str = "study,k,h,dt,error,rate,max_constraint_residual";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    SystemIo(#[from] IoError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Dae(#[from] DaeError),
    #[error("certification failed: {}", .0.verdict.failures.join("; "))]
    CertificationFailed(Box<Certificate>),
}

fn hypothesis_failure(e: &DaeError) -> bool {
    matches!(
        e,
        DaeError::CertificationFailed(_)
            | DaeError::StepMatrixSingular { .. }
            | DaeError::StepExceedsGarding { .. }
            | DaeError::RankDeficientB { .. }
            | DaeError::NoPositiveAlpha { .. }
    )
}

impl CliError {
    /// 2 when a hypothesis fails (certificate or singular step matrix),
    /// 1 for configuration, I/O and other numerical errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CertificationFailed(_) => 2,
            CliError::Dae(e) | CliError::Problem(ProblemError::Dae(e)) if hypothesis_failure(e) => 2,
            _ => 1,
        }
    }
}

/// Command-line values that override the config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    /// One value sets the mesh `k`; for `convergence` the list replaces `k_list`.
    pub k: Vec<usize>,
    pub scheme: Option<Scheme>,
    pub out: Option<std::path::PathBuf>,
}

impl Overrides {
    pub fn apply(&self, command: Command, config: &mut RunConfig) {
        if let Some(dt) = self.dt {
            config.dt = dt;
        }
        if let Some(scheme) = self.scheme {
            config.scheme = scheme;
        }
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        match (command, self.k.as_slice()) {
            (_, []) => {}
            (Command::Convergence, ks) => config.k_list = ks.to_vec(),
            (_, [k, ..]) => config.recipe.k = *k,
        }
    }
}
