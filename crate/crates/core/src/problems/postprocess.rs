//! Physical quantities recovered from a trajectory.

use crate::dae::Trajectory;
use crate::fem::StokesAssembly;
use crate::linalg::Vector;

/// Backward differences `(xⁿ − xⁿ⁻¹)/dt` for `n ≥ 1`, paired with `tⁿ`.
pub fn backward_differences(times: &[f64], values: &[Vector]) -> Vec<(f64, Vector)> {
    (1..values.len())
        .map(|i| {
            let dt = times[i] - times[i - 1];
            (times[i], (&values[i] - &values[i - 1]) / dt)
        })
        .collect()
}

/// Stokes pressure at every vertex for `n ≥ 1`: the multiplier is a time
/// primitive of the pressure, so `pⁿ = D (λⁿ − λⁿ⁻¹)/dt`.
pub fn stokes_pressure(assembly: &StokesAssembly, trajectory: &Trajectory) -> Vec<(f64, Vector)> {
    backward_differences(&trajectory.times, &trajectory.lambda)
        .into_iter()
        .map(|(t, p)| (t, assembly.expand_pressure(&p)))
        .collect()
}

/// Eddy-current electric field `Eⁿ = (uⁿ − uⁿ⁻¹)/dt` in edge coefficients, for `n ≥ 1`.
pub fn electric_field(trajectory: &Trajectory) -> Vec<(f64, Vector)> {
    backward_differences(&trajectory.times, &trajectory.u)
}
