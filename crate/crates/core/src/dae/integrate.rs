use std::fmt;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::{CertifiedSystem, DaeError, DiscreteMixedSystem, Result};
use crate::linalg::{
    gram_norm, lu_solve, saddle_factorize, symmetrize, DenseMatrix, LinalgError, SaddleFactorization,
    Vector,
};

/// Implicit one-step scheme applied to the history variable `w = R u + Bᵀλ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[serde(alias = "be")]
    BackwardEuler,
    #[serde(alias = "cn")]
    CrankNicolson,
}

impl Scheme {
    /// Weight of the new time level.
    pub fn theta(self) -> f64 {
        match self {
            Scheme::BackwardEuler => 1.0,
            Scheme::CrankNicolson => 0.5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::BackwardEuler => "backward-euler",
            Scheme::CrankNicolson => "crank-nicolson",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "backward-euler" | "be" => Ok(Scheme::BackwardEuler),
            "crank-nicolson" | "cn" => Ok(Scheme::CrankNicolson),
            other => Err(format!("unknown scheme `{other}` (expected backward-euler or crank-nicolson)")),
        }
    }
}

/// Per-step states on a uniform grid `tⁿ = n·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub dt: f64,
    pub times: Vec<f64>,
    pub u: Vec<Vector>,
    pub lambda: Vec<Vector>,
}

/// Norms reported for one time level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepNorms {
    pub t: f64,
    pub norm_u_x: f64,
    pub norm_lambda_m: f64,
    pub constraint_residual: f64,
}

impl Trajectory {
    /// Number of steps `N` (the grid has `N + 1` points).
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn norms(&self, sys: &DiscreteMixedSystem) -> Vec<StepNorms> {
        self.times
            .iter()
            .enumerate()
            .map(|(n, &t)| StepNorms {
                t,
                norm_u_x: gram_norm(sys.mx(), &self.u[n]),
                norm_lambda_m: gram_norm(sys.mm(), &self.lambda[n]),
                constraint_residual: (sys.b() * &self.u[n] - sys.g().eval(t)).norm(),
            })
            .collect()
    }

    /// Largest `‖B uⁿ − g(tⁿ)‖ / (1 + ‖g(tⁿ)‖)` over `n ≥ 1`.
    pub fn max_relative_constraint_residual(&self, sys: &DiscreteMixedSystem) -> f64 {
        self.times
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &t)| {
                let g = sys.g().eval(t);
                (sys.b() * &self.u[n] - &g).norm() / (1.0 + g.norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Kernel-coordinate trajectory and its reconstruction `u = Z ũ + z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedTrajectory {
    pub scheme: Scheme,
    pub dt: f64,
    pub times: Vec<f64>,
    pub kernel: Vec<Vector>,
    pub u: Vec<Vector>,
}

pub(crate) fn time_grid(t_final: f64, dt: f64) -> Result<(usize, Vec<f64>)> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DaeError::InvalidStep(format!("dt = {dt} is not positive")));
    }
    let steps = (t_final / dt).round();
    if steps < 1.0 || (steps * dt - t_final).abs() > 1e-9 * t_final {
        return Err(DaeError::InvalidStep(format!(
            "dt = {dt} does not divide the final time {t_final}"
        )));
    }
    let steps = steps as usize;
    let times = (0..=steps).map(|n| t_final * n as f64 / steps as f64).collect();
    Ok((steps, times))
}

fn check_step(cs: &CertifiedSystem, dt: f64, scheme: Scheme) -> Result<()> {
    let gamma = cs.gamma();
    let product = scheme.theta() * dt * gamma;
    if product >= 1.0 {
        return Err(DaeError::StepExceedsGarding { dt, gamma, product });
    }
    Ok(())
}

fn factorize_step(s: &DenseMatrix, b: &DenseMatrix, dt: f64, gamma: f64) -> Result<SaddleFactorization> {
    saddle_factorize(s, b).map_err(|e| match e {
        LinalgError::SingularMatrix { .. } => DaeError::StepMatrixSingular { dt, gamma },
        other => other.into(),
    })
}

/// Kernel coordinates `c` of an initial state `z(0) + Z c` consistent with
/// the algebraic part of the equation: `ZᵀRZ c` matches `ZᵀR(u0 − z(0))`,
/// and on the null space of `ZᵀRZ` the kernel equation holds at `t = 0`.
fn consistent_kernel_coordinates(cs: &CertifiedSystem) -> Result<Vector> {
    let sys = cs.system();
    let z = cs.kernel_basis();
    let k = z.ncols();
    if k == 0 {
        return Ok(Vector::zeros(0));
    }
    let z0 = cs.lift(0.0);
    let rk = symmetrize(&(z.transpose() * sys.r() * z));
    let ak = symmetrize(&(z.transpose() * sys.a() * z));
    let rhs = z.transpose() * (sys.r() * (sys.u0() - &z0));
    if let Some(chol) = nalgebra::Cholesky::new(rk.clone()) {
        let pivots = chol.l_dirty().diagonal();
        let scale = rk.diagonal().amax();
        if pivots.iter().all(|p| p * p > 1e-8 * scale) {
            return Ok(chol.solve(&rhs));
        }
    }
    let eig = SymmetricEigen::new(rk);
    let largest = eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = 1e-10 * largest;
    let mut c = Vector::zeros(k);
    let mut null_cols = Vec::new();
    for i in 0..k {
        let v = eig.eigenvectors.column(i);
        let value = eig.eigenvalues[i];
        if largest > 0.0 && value.abs() > cutoff {
            c += v * (v.dot(&rhs) / value);
        } else {
            null_cols.push(i);
        }
    }
    if !null_cols.is_empty() {
        let q0 = eig.eigenvectors.select_columns(&null_cols);
        let load = z.transpose() * (sys.f().eval(0.0) - sys.a() * &z0) - &ak * &c;
        let d = lu_solve(&(q0.transpose() * &ak * &q0), &(q0.transpose() * load))?;
        c += q0 * d;
    }
    Ok(c)
}

/// Time-steps the saddle-point DAE in history form.
///
/// With `w⁰ = R u0` and `θ = 1` (backward Euler) or `θ = ½`
/// (Crank–Nicolson), each step solves
/// `[[R + θ·dt·A, Bᵀ], [B, 0]] (uⁿ⁺¹, λⁿ⁺¹) = (wⁿ + dt·f̄ − (1−θ)·dt·A uⁿ, g(tⁿ⁺¹))`
/// with `f̄ = θ f(tⁿ⁺¹) + (1−θ) f(tⁿ)` and then advances
/// `wⁿ⁺¹ = wⁿ + dt·(f̄ − A(θ uⁿ⁺¹ + (1−θ) uⁿ))`. `λ⁰` is zero.
///
/// Both schemes report as `u⁰` the consistent initial state: it agrees
/// with `u0` wherever `R` sees it and satisfies the algebraic part of the
/// equation elsewhere.
pub fn integrate(cs: &CertifiedSystem, dt: f64, scheme: Scheme) -> Result<Trajectory> {
    let sys = cs.system();
    let (steps, times) = time_grid(sys.t_final(), dt)?;
    let dt = times[1] - times[0];
    check_step(cs, dt, scheme)?;
    let theta = scheme.theta();
    let step_matrix = sys.r() + sys.a() * (theta * dt);
    let fact = factorize_step(&step_matrix, sys.b(), dt, cs.gamma())?;

    let mut w = sys.r() * sys.u0();
    let mut f_old = sys.f().eval(0.0);
    let u_init = cs.lift(0.0) + cs.kernel_basis() * consistent_kernel_coordinates(cs)?;
    let mut u = Vec::with_capacity(steps + 1);
    let mut lambda = Vec::with_capacity(steps + 1);
    u.push(u_init);
    lambda.push(Vector::zeros(sys.m()));
    for &t in &times[1..] {
        let f_new = sys.f().eval(t);
        let f_bar = &f_new * theta + &f_old * (1.0 - theta);
        let u_old = u.last().expect("initial state pushed");
        let mut rhs = &w + &f_bar * dt;
        if theta < 1.0 {
            rhs -= sys.a() * u_old * ((1.0 - theta) * dt);
        }
        let (u_new, lambda_new) = fact.solve(&rhs, &sys.g().eval(t))?;
        let u_mid = if theta < 1.0 {
            &u_new * theta + u_old * (1.0 - theta)
        } else {
            u_new.clone()
        };
        w += (f_bar - sys.a() * u_mid) * dt;
        u.push(u_new);
        lambda.push(lambda_new);
        f_old = f_new;
    }
    Ok(Trajectory {
        scheme,
        dt,
        times,
        u,
        lambda,
    })
}

/// Integrates the kernel-projected problem for `ũ` with matrices `ZᵀRZ`,
/// `ZᵀAZ` and load `Zᵀ(f − A z − R ż)`, where `ż` comes from central
/// differences of the lift (one-sided at the ends), and reconstructs
/// `u = Z ũ + z`. The history starts from `ZᵀR(u0 − z(0))`.
pub fn integrate_reduced(cs: &CertifiedSystem, dt: f64, scheme: Scheme) -> Result<ReducedTrajectory> {
    let sys = cs.system();
    let (steps, times) = time_grid(sys.t_final(), dt)?;
    let dt = times[1] - times[0];
    check_step(cs, dt, scheme)?;
    let theta = scheme.theta();
    let z = cs.kernel_basis();
    let k = z.ncols();
    let zt = z.transpose();
    let rk = symmetrize(&(&zt * sys.r() * z));
    let ak = symmetrize(&(&zt * sys.a() * z));
    let lifts: Vec<Vector> = times.iter().map(|&t| cs.lift(t)).collect();
    let lift_rate = |n: usize| -> Vector {
        if n == 0 {
            (&lifts[1] - &lifts[0]) / dt
        } else if n == steps {
            (&lifts[steps] - &lifts[steps - 1]) / dt
        } else {
            (&lifts[n + 1] - &lifts[n - 1]) / (2.0 * dt)
        }
    };
    let load = |n: usize| -> Vector {
        &zt * (sys.f().eval(times[n]) - sys.a() * &lifts[n] - sys.r() * lift_rate(n))
    };

    let fact = factorize_step(&(&rk + &ak * (theta * dt)), &DenseMatrix::zeros(0, k), dt, cs.gamma())?;
    let shifted = sys.u0() - &lifts[0];
    let mut w = &zt * (sys.r() * &shifted);
    let c0 = consistent_kernel_coordinates(cs)?;
    let mut kernel = Vec::with_capacity(steps + 1);
    kernel.push(c0);
    let mut f_old = load(0);
    let empty = Vector::zeros(0);
    for n in 1..=steps {
        let f_new = load(n);
        let f_bar = &f_new * theta + &f_old * (1.0 - theta);
        let c_old = kernel.last().expect("initial state pushed");
        let mut rhs = &w + &f_bar * dt;
        if theta < 1.0 {
            rhs -= &ak * c_old * ((1.0 - theta) * dt);
        }
        let (c_new, _) = fact.solve(&rhs, &empty)?;
        let c_mid = &c_new * theta + c_old * (1.0 - theta);
        w += (f_bar - &ak * c_mid) * dt;
        kernel.push(c_new);
        f_old = f_new;
    }
    let u = kernel.iter().zip(&lifts).map(|(c, zl)| z * c + zl).collect();
    Ok(ReducedTrajectory {
        scheme,
        dt,
        times,
        kernel,
        u,
    })
}
