use serde::{Deserialize, Serialize};

use super::{CertifiedSystem, Scheme, Trajectory};
use crate::linalg::Vector;

/// Quadrature for the time integrals of `A u` and `f` inside `G(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistoryQuadrature {
    /// Right-endpoint rectangles, the rule implied by backward Euler.
    RightEndpoint,
    /// Left-endpoint rectangles.
    LeftEndpoint,
    /// Trapezoid rule, the rule implied by Crank–Nicolson.
    Trapezoid,
}

impl HistoryQuadrature {
    pub fn matching(scheme: Scheme) -> Self {
        match scheme {
            Scheme::BackwardEuler => HistoryQuadrature::RightEndpoint,
            Scheme::CrankNicolson => HistoryQuadrature::Trapezoid,
        }
    }
}

/// Recovers the multiplier from the primal trajectory alone, using the
/// quadrature that matches the trajectory's scheme. In that case the
/// recovered multiplier coincides with the time-stepped one up to round-off.
pub fn recover_multiplier(cs: &CertifiedSystem, traj: &Trajectory) -> Vec<Vector> {
    recover_multiplier_with(cs, traj, HistoryQuadrature::matching(traj.scheme))
}

/// Builds `Gⁿ = R(u0 − uⁿ) − ∫₀^{tⁿ} A u + ∫₀^{tⁿ} f` and returns
/// `λⁿ = (B Mx⁻¹ Bᵀ)⁻¹ B Mx⁻¹ Gⁿ`, with `λ⁰ = 0`. Rules that sample
/// `t = 0` use the trajectory's reported `u⁰` there.
pub fn recover_multiplier_with(
    cs: &CertifiedSystem,
    traj: &Trajectory,
    quadrature: HistoryQuadrature,
) -> Vec<Vector> {
    let sys = cs.system();
    let ru0 = sys.r() * sys.u0();
    let integrand: Vec<Vector> = traj
        .times
        .iter()
        .zip(&traj.u)
        .map(|(&t, u)| sys.f().eval(t) - sys.a() * u)
        .collect();
    let mut history = Vector::zeros(sys.n());
    let mut out = Vec::with_capacity(traj.times.len());
    out.push(Vector::zeros(sys.m()));
    for n in 1..traj.times.len() {
        let dt = traj.times[n] - traj.times[n - 1];
        history += match quadrature {
            HistoryQuadrature::RightEndpoint => &integrand[n] * dt,
            HistoryQuadrature::LeftEndpoint => &integrand[n - 1] * dt,
            HistoryQuadrature::Trapezoid => (&integrand[n] + &integrand[n - 1]) * (0.5 * dt),
        };
        let g = &ru0 - sys.r() * &traj.u[n] + &history;
        out.push(cs.multiplier_from_residual(&g));
    }
    out
}
