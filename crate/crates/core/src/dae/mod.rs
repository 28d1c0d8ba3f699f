//! Matrix-level degenerate mixed evolution problems.
//!
//! A [`DiscreteMixedSystem`] carries the matrices `R`, `A`, `B`, the Gram
//! matrices of the three norms, the loads `f(t)`, `g(t)` and the initial
//! datum. [`certify`] checks the structural hypotheses numerically and
//! [`CertifiedSystem`] is the only entry point to the time integrators.

mod certify;
mod energy;
pub mod io;
mod integrate;
mod recover;
mod system;

pub use certify::{
    certify, garding_constants, inf_sup_constant, lift_vperp, Certificate, CertifiedSystem,
    GardingConstants, GardingPoint, Tolerances, Verdict,
};
pub use energy::{energy_report, l2_in_time, l2_time_distance, EnergyReport};
pub use integrate::{integrate, integrate_reduced, ReducedTrajectory, Scheme, StepNorms, Trajectory};
pub use recover::{recover_multiplier, recover_multiplier_with, HistoryQuadrature};
pub use system::{DiscreteMixedSystem, Load, LoadTerm, SystemParts, TimeProfile};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DaeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("B is rank deficient (rank {rank} < {rows} rows); the inf-sup condition fails")]
    RankDeficientB { rank: usize, rows: usize },
    #[error("Garding search needs a nonempty grid and a nontrivial kernel")]
    EmptyKernelGrid,
    #[error("no grid value of gamma gives a positive alpha (best alpha {best_alpha:e})")]
    NoPositiveAlpha { best_alpha: f64 },
    #[error("certification failed: {}", .0.verdict.failures.join("; "))]
    CertificationFailed(Box<Certificate>),
    #[error("invalid time step: {0}")]
    InvalidStep(String),
    #[error("step size too large: theta*dt*gamma = {product} must be below 1 (dt = {dt}, gamma = {gamma})")]
    StepExceedsGarding { dt: f64, gamma: f64, product: f64 },
    #[error("step matrix is singular at dt = {dt} (dt*gamma = {}); the inf-sup or Garding hypothesis is violated", .dt * .gamma)]
    StepMatrixSingular { dt: f64, gamma: f64 },
}

pub type Result<T> = std::result::Result<T, DaeError>;
