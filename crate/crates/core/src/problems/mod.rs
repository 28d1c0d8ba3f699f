//! Model problems that produce a [`DiscreteMixedSystem`].
//!
//! A [`ProblemRecipe`] names a problem and its parameters. [`build_system`]
//! assembles the matrices and data without checking any hypothesis;
//! [`build`] additionally certifies the result and refuses to hand out a
//! system that fails.

pub mod convergence;
pub mod eddy;
pub mod postprocess;
mod recipe;
pub mod stokes;
pub mod synthetic;

use std::sync::Arc;

use thiserror::Error;

pub use recipe::{ProblemRecipe, RecipeKind};

use crate::dae::{
    certify, CertifiedSystem, DaeError, DiscreteMixedSystem, Load, SystemParts, TimeProfile, Tolerances,
    Trajectory,
};
use crate::fem::{
    assemble_edge2d, assemble_stokes, structured_mesh, EddyAssembly, EddyError, ExactField, FeSpace, MeshError,
    NormKind, StokesAssembly,
};
use crate::linalg::{saddle_factorize, LinalgError, Vector};

/// Attempts made by the synthetic generator before giving up.
pub const SYNTHETIC_ATTEMPTS: u64 = 64;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Eddy(#[from] EddyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Dae(#[from] DaeError),
    #[error("no certifiable synthetic system after {0} attempts")]
    SyntheticExhausted(u64),
}

/// The finite-element objects behind a system, kept for post-processing.
#[derive(Clone, Debug)]
pub enum Discretization {
    Stokes(Box<StokesAssembly>),
    Eddy(Box<EddyAssembly>),
    Synthetic,
}

/// Recipe plus discretization; shared by built and certified problems.
#[derive(Clone, Debug)]
pub struct ProblemInfo {
    pub recipe: ProblemRecipe,
    pub discretization: Discretization,
}

#[derive(Clone, Debug)]
pub struct BuiltProblem {
    pub info: ProblemInfo,
    pub system: DiscreteMixedSystem,
}

#[derive(Clone, Debug)]
pub struct CertifiedProblem {
    pub info: ProblemInfo,
    pub certified: CertifiedSystem,
}

/// Assembles the system named by `recipe` without certifying it.
pub fn build_system(recipe: &ProblemRecipe) -> Result<BuiltProblem, ProblemError> {
    recipe.validate().map_err(ProblemError::InvalidRecipe)?;
    let (mut parts, discretization) = match recipe.problem {
        RecipeKind::StokesMms | RecipeKind::StokesNonsolenoidal => build_stokes(recipe)?,
        RecipeKind::Eddy2dConductor => build_eddy(recipe)?,
        RecipeKind::SyntheticRandom => (build_synthetic(recipe)?, Discretization::Synthetic),
    };
    if recipe.zero_data {
        parts.f = Load::zero(parts.f.dim());
        parts.g = Load::zero(parts.g.dim());
        parts.u0 = Vector::zeros(parts.u0.len());
    }
    if recipe.fault_zero_b_row && parts.b.nrows() > 0 {
        parts.b.row_mut(0).fill(0.0);
    }
    Ok(BuiltProblem {
        info: ProblemInfo {
            recipe: recipe.clone(),
            discretization,
        },
        system: DiscreteMixedSystem::new(parts)?,
    })
}

/// Assembles and certifies; a failing certificate comes back inside
/// [`DaeError::CertificationFailed`].
pub fn build(recipe: &ProblemRecipe, tol: &Tolerances) -> Result<CertifiedProblem, ProblemError> {
    build_system(recipe)?.certify(tol)
}

impl BuiltProblem {
    pub fn certify(self, tol: &Tolerances) -> Result<CertifiedProblem, ProblemError> {
        Ok(CertifiedProblem {
            info: self.info,
            certified: CertifiedSystem::new(self.system, tol)?,
        })
    }
}

impl CertifiedProblem {
    pub fn system(&self) -> &DiscreteMixedSystem {
        self.certified.system()
    }
}

fn build_stokes(recipe: &ProblemRecipe) -> Result<(SystemParts, Discretization), ProblemError> {
    let mesh = Arc::new(structured_mesh(recipe.k, None)?);
    let asm = assemble_stokes(mesh, recipe.nu)?;
    let nu = recipe.nu;
    let amp = recipe.amplitude;
    let decay = TimeProfile::Exp { rate: -1.0 };
    let nonsolenoidal = recipe.problem == RecipeKind::StokesNonsolenoidal;

    let forcing = if nonsolenoidal {
        asm.velocity.load_vector(|x, y| stokes::nonsolenoidal_forcing(nu, x, y))
    } else {
        asm.velocity.load_vector(|x, y| stokes::mms_forcing(nu, x, y))
    };
    let f = Load::single(asm.velocity.reduce_vector(&forcing) * amp, decay);

    let g = if nonsolenoidal {
        let full = asm
            .pressure
            .load_vector(|x, y| [-stokes::nonsolenoidal_divergence(x, y), 0.0]);
        let deflated = asm.deflation.transpose().mul_vec(&full)?;
        Load::single(deflated * amp, decay)
    } else {
        Load::zero(asm.divergence.rows())
    };

    let b = asm.divergence.to_dense();
    let my = asm.mass.to_dense();
    let a = asm.stiffness.to_dense();
    let u0 = if recipe.zero_initial {
        Vector::zeros(asm.velocity.reduced_dofs())
    } else {
        // Discrete Stokes projection of the exact velocity at t = 0: the
        // forcing plus the velocity itself is `−νΔu* + ∇p*`.
        let velocity: fn(f64, f64) -> [f64; 2] = if nonsolenoidal {
            stokes::nonsolenoidal_velocity
        } else {
            stokes::mms_velocity
        };
        let target = asm.velocity.load_vector(velocity) + &forcing;
        let rhs = asm.velocity.reduce_vector(&target) * amp;
        saddle_factorize(&a, &b)?.solve(&rhs, &g.eval(0.0))?.0
    };

    let parts = SystemParts {
        name: recipe.problem.as_str().into(),
        r: my.clone(),
        a,
        b,
        mx: asm.h1_seminorm_gram.to_dense(),
        my,
        mm: asm.pressure_mass.to_dense(),
        f,
        g,
        u0,
        t_final: recipe.t_final,
        g_regular: true,
    };
    Ok((parts, Discretization::Stokes(Box::new(asm))))
}

fn build_eddy(recipe: &ProblemRecipe) -> Result<(SystemParts, Discretization), ProblemError> {
    let mesh = Arc::new(structured_mesh(recipe.k, Some(recipe.conductor_box))?);
    let coefficients = eddy::EddyCoefficients {
        sigma: (recipe.sigma0, recipe.sigma1),
        mu: (recipe.mu0, recipe.mu1),
        eps: (recipe.eps0, recipe.eps1),
    };
    let (sigma, mu, eps) = coefficients.per_triangle(&mesh, &recipe.conductor_box);
    let asm = assemble_edge2d(mesh, &sigma, &mu, &eps)?;
    let source = asm.primal.curl_load_vector(eddy::applied_field);
    let f = Load::single(asm.primal.reduce_vector(&source) * recipe.amplitude, recipe.source_profile);
    let n = asm.primal.reduced_dofs();
    let parts = SystemParts {
        name: recipe.problem.as_str().into(),
        r: asm.sigma_mass.to_dense(),
        a: asm.curl_curl.to_dense(),
        b: asm.constraint.to_dense(),
        mx: asm.hcurl_gram.to_dense(),
        my: asm.l2_gram.to_dense(),
        mm: asm.multiplier_gram.to_dense(),
        f,
        g: Load::zero(asm.multiplier.reduced_dofs()),
        u0: Vector::zeros(n),
        t_final: recipe.t_final,
        g_regular: true,
    };
    Ok((parts, Discretization::Eddy(Box::new(asm))))
}

/// Draws synthetic systems from consecutive seeds until one certifies.
fn build_synthetic(recipe: &ProblemRecipe) -> Result<SystemParts, ProblemError> {
    let tol = Tolerances::default();
    for attempt in 0..SYNTHETIC_ATTEMPTS {
        let seed = recipe.seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut parts = synthetic::synthetic_parts(recipe.n, recipe.m, recipe.r_deficiency, seed, recipe.t_final)?;
        parts.f = parts.f.scaled(recipe.amplitude);
        parts.g = parts.g.scaled(recipe.amplitude);
        parts.u0 *= recipe.amplitude;
        let candidate = DiscreteMixedSystem::new(parts)?;
        if certify(&candidate, &tol)?.verdict.pass {
            return Ok(candidate.into_parts());
        }
    }
    Err(ProblemError::SyntheticExhausted(SYNTHETIC_ATTEMPTS))
}

impl ProblemInfo {
    fn data_scale(&self, t: f64) -> f64 {
        if self.recipe.zero_data {
            0.0
        } else {
            self.recipe.amplitude * stokes::time_factor(t)
        }
    }

    /// Exact Stokes velocity at time `t` (`None` for other problems).
    pub fn exact_velocity(&self, t: f64) -> Option<ExactField<'static>> {
        let s = self.data_scale(t);
        match self.recipe.problem {
            RecipeKind::StokesMms => Some(ExactField::vector(
                move |x, y| stokes::mms_velocity(x, y).map(|v| s * v),
                move |x, y| stokes::mms_velocity_jacobian(x, y).map(|row| row.map(|v| s * v)),
            )),
            RecipeKind::StokesNonsolenoidal => Some(ExactField::vector(
                move |x, y| stokes::nonsolenoidal_velocity(x, y).map(|v| s * v),
                move |x, y| stokes::nonsolenoidal_velocity_jacobian(x, y).map(|row| row.map(|v| s * v)),
            )),
            _ => None,
        }
    }

    /// Exact Stokes pressure at time `t` (`None` for other problems).
    pub fn exact_pressure(&self, t: f64) -> Option<ExactField<'static>> {
        if !self.recipe.problem.is_stokes() {
            return None;
        }
        let s = self.data_scale(t);
        Some(ExactField::scalar(
            move |x, y| s * stokes::pressure(x, y),
            move |x, y| stokes::pressure_gradient(x, y).map(|v| s * v),
        ))
    }

    pub fn stokes(&self) -> Option<&StokesAssembly> {
        match &self.discretization {
            Discretization::Stokes(a) => Some(a),
            _ => None,
        }
    }

    pub fn eddy(&self) -> Option<&EddyAssembly> {
        match &self.discretization {
            Discretization::Eddy(a) => Some(a),
            _ => None,
        }
    }

    /// Velocity error of reduced coefficients at time `t` in the given norm.
    pub fn velocity_error(&self, u: &Vector, t: f64, kind: NormKind) -> Option<f64> {
        let space: &FeSpace = &self.stokes()?.velocity;
        let exact = self.exact_velocity(t)?;
        Some(space.error_norm(&space.expand(u), &exact, kind))
    }

    /// `max over n ≥ 1` of the L² velocity error along a trajectory.
    pub fn max_velocity_error(&self, trajectory: &Trajectory, kind: NormKind) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for (t, u) in trajectory.times.iter().zip(&trajectory.u).skip(1) {
            worst = worst.max(self.velocity_error(u, *t, kind)?);
        }
        Some(worst)
    }

    /// `max over n ≥ 1` of the L² pressure error, with pressures recovered
    /// from multiplier differences.
    pub fn max_pressure_error(&self, trajectory: &Trajectory) -> Option<f64> {
        let asm = self.stokes()?;
        let mut worst: f64 = 0.0;
        for (t, p) in postprocess::stokes_pressure(asm, trajectory) {
            let exact = self.exact_pressure(t)?;
            worst = worst.max(asm.pressure.error_norm(&p, &exact, NormKind::L2));
        }
        Some(worst)
    }
}
