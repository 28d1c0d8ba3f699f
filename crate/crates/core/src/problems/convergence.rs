//! Mesh- and step-refinement studies for the Stokes recipes.

use serde::Serialize;

use super::{build, ProblemError, ProblemRecipe};
use crate::dae::{integrate, l2_in_time, l2_time_distance, Scheme, Tolerances};
use crate::fem::NormKind;

/// One row of a refinement study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub study: &'static str,
    pub k: usize,
    pub h: f64,
    pub dt: f64,
    pub error: f64,
    /// `log2(previous error / this error)`; absent on the first row.
    pub rate: Option<f64>,
    pub max_constraint_residual: f64,
}

fn fill_rates(points: &mut [RatePoint]) {
    for i in 1..points.len() {
        let (prev, cur) = (points[i - 1].error, points[i].error);
        let ratio = points[i - 1].dt / points[i].dt;
        points[i].rate = (prev > 0.0 && cur > 0.0).then(|| (prev / cur).ln() / ratio.ln());
    }
}

fn require_stokes(recipe: &ProblemRecipe) -> Result<(), ProblemError> {
    if recipe.problem.is_stokes() {
        Ok(())
    } else {
        Err(ProblemError::InvalidRecipe(format!(
            "convergence studies need a Stokes recipe, got {}",
            recipe.problem
        )))
    }
}

/// Velocity error in `L²(0,T;H¹)` against the exact solution for each
/// mesh size `1/k`, with `dt = dt_factor · h²`. Rates are measured per
/// halving of `h`.
pub fn spatial_study(
    recipe: &ProblemRecipe,
    ks: &[usize],
    dt_factor: f64,
    scheme: Scheme,
    tol: &Tolerances,
) -> Result<Vec<RatePoint>, ProblemError> {
    require_stokes(recipe)?;
    let mut points = Vec::with_capacity(ks.len());
    for &k in ks {
        let h = 1.0 / k as f64;
        let dt = dt_factor * h * h;
        let problem = build(&recipe.clone().with_k(k), tol)?;
        let traj = integrate(&problem.certified, dt, scheme)?;
        let squares: Vec<f64> = traj
            .times
            .iter()
            .zip(&traj.u)
            .map(|(&t, u)| {
                problem
                    .info
                    .velocity_error(u, t, NormKind::H1)
                    .expect("Stokes recipe")
                    .powi(2)
            })
            .collect();
        points.push(RatePoint {
            study: "spatial",
            k,
            h,
            dt,
            error: l2_in_time(&traj.times, &squares),
            rate: None,
            max_constraint_residual: traj.max_relative_constraint_residual(problem.system()),
        });
    }
    for i in 1..points.len() {
        let (a, b) = (&points[i - 1], &points[i]);
        points[i].rate = (a.error > 0.0 && b.error > 0.0).then(|| (a.error / b.error).ln() / (a.h / b.h).ln());
    }
    Ok(points)
}

/// Temporal self-convergence on the mesh `recipe.k`: the error for step
/// `dtᵢ` is the `L²(0,T;H¹)` distance between the solutions at `dtᵢ` and
/// `dtᵢ₊₁`, sampled on the coarser grid. Step sizes must be successive
/// halvings; the finest only serves as a reference.
pub fn temporal_study(
    recipe: &ProblemRecipe,
    dts: &[f64],
    scheme: Scheme,
    tol: &Tolerances,
) -> Result<Vec<RatePoint>, ProblemError> {
    require_stokes(recipe)?;
    for w in dts.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(ProblemError::InvalidRecipe("temporal study needs successively halved steps".into()));
        }
    }
    let problem = build(recipe, tol)?;
    let gram = problem.info.stokes().expect("Stokes recipe").h1_gram.to_dense();
    let mut runs = Vec::with_capacity(dts.len());
    for &dt in dts {
        runs.push(integrate(&problem.certified, dt, scheme)?);
    }
    let h = 1.0 / recipe.k as f64;
    let mut points: Vec<RatePoint> = runs
        .windows(2)
        .map(|pair| {
            let (coarse, fine) = (&pair[0], &pair[1]);
            let sampled: Vec<_> = fine.u.iter().step_by(2).cloned().collect();
            RatePoint {
                study: "temporal",
                k: recipe.k,
                h,
                dt: coarse.dt,
                error: l2_time_distance(&gram, &coarse.times, &coarse.u, &sampled),
                rate: None,
                max_constraint_residual: coarse.max_relative_constraint_residual(problem.system()),
            }
        })
        .collect();
    fill_rates(&mut points);
    Ok(points)
}
