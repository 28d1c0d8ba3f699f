use serde::Serialize;

use super::{DiscreteMixedSystem, Result, Trajectory};
use crate::linalg::{cholesky, gram_norm, DenseMatrix, Vector};

/// Both sides of the a-priori estimate, measured on one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    /// `‖u‖_{L²(0,T;X)} + ‖λ‖_{L²(0,T;M)}`
    pub lhs: f64,
    pub u_l2_x: f64,
    pub lambda_l2_m: f64,
    /// `‖f‖_{L²(0,T;X')} + ‖g‖_{H¹(0,T;M')} + ‖u0‖_Y`
    pub rhs_data: f64,
    pub f_l2_x_dual: f64,
    pub g_h1_m_dual: f64,
    pub u0_y: f64,
    /// `lhs / rhs_data`; `None` when the data vanish.
    #[serde(rename = "empirical_C")]
    pub empirical_c: Option<f64>,
}

/// Trapezoid-rule `sqrt(∫ s(t) dt)` from samples `s(tⁿ)` of a squared norm.
pub fn l2_in_time(times: &[f64], squares: &[f64]) -> f64 {
    let integral: f64 = times
        .windows(2)
        .zip(squares.windows(2))
        .map(|(t, s)| 0.5 * (t[1] - t[0]) * (s[0] + s[1]))
        .sum();
    integral.max(0.0).sqrt()
}

/// `‖a − b‖_{L²(0,T)}` in the norm of `gram`, trapezoid rule in time.
pub fn l2_time_distance(gram: &DenseMatrix, times: &[f64], a: &[Vector], b: &[Vector]) -> f64 {
    let squares: Vec<f64> = a.iter().zip(b).map(|(x, y)| gram_norm(gram, &(x - y)).powi(2)).collect();
    l2_in_time(times, &squares)
}

pub fn energy_report(sys: &DiscreteMixedSystem, traj: &Trajectory) -> Result<EnergyReport> {
    let times = &traj.times;
    let u_sq: Vec<f64> = traj.u.iter().map(|u| gram_norm(sys.mx(), u).powi(2)).collect();
    let l_sq: Vec<f64> = traj.lambda.iter().map(|l| gram_norm(sys.mm(), l).powi(2)).collect();
    let u_l2_x = l2_in_time(times, &u_sq);
    let lambda_l2_m = l2_in_time(times, &l_sq);

    let mx = cholesky(sys.mx())?;
    let mm = cholesky(sys.mm())?;
    let dual_sq = |chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>, v: Vector| -> f64 {
        if v.is_empty() {
            0.0
        } else {
            v.dot(&chol.solve(&v)).max(0.0)
        }
    };
    let f_sq: Vec<f64> = times.iter().map(|&t| dual_sq(&mx, sys.f().eval(t))).collect();
    let g_sq: Vec<f64> = times
        .iter()
        .map(|&t| dual_sq(&mm, sys.g().eval(t)) + dual_sq(&mm, sys.g().derivative(t)))
        .collect();
    let f_l2_x_dual = l2_in_time(times, &f_sq);
    let g_h1_m_dual = l2_in_time(times, &g_sq);
    let u0_y = gram_norm(sys.my(), sys.u0());

    let lhs = u_l2_x + lambda_l2_m;
    let rhs_data = f_l2_x_dual + g_h1_m_dual + u0_y;
    Ok(EnergyReport {
        lhs,
        u_l2_x,
        lambda_l2_m,
        rhs_data,
        f_l2_x_dual,
        g_h1_m_dual,
        u0_y,
        empirical_c: (rhs_data > 0.0).then(|| lhs / rhs_data),
    })
}
