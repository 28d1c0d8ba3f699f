//! Manufactured fields for transient Stokes on the unit square.
//!
//! With `a(s) = s²(1−s)²`, the solenoidal velocity is
//! `u* = e^{−t} (a(x) a'(y), −a'(x) a(y))` (the curl of the stream
//! function `a(x) a(y)`), the pressure `p* = e^{−t} (x³ − 1/4)`, and the
//! forcing `f = ∂ₜu* − νΔu* + ∇p*`. The non-solenoidal variant uses
//! `w* = e^{−t} a(x) a(y) (1, 1)` with the same pressure.

fn a0(s: f64) -> f64 {
    s * s * (1.0 - s) * (1.0 - s)
}
fn a1(s: f64) -> f64 {
    2.0 * s - 6.0 * s * s + 4.0 * s * s * s
}
fn a2(s: f64) -> f64 {
    2.0 - 12.0 * s + 12.0 * s * s
}
fn a3(s: f64) -> f64 {
    -12.0 + 24.0 * s
}

pub fn time_factor(t: f64) -> f64 {
    (-t).exp()
}

/// Spatial part of the solenoidal velocity.
pub fn mms_velocity(x: f64, y: f64) -> [f64; 2] {
    [a0(x) * a1(y), -a1(x) * a0(y)]
}

/// Jacobian `J[i][j] = ∂ⱼ uᵢ` of [`mms_velocity`].
pub fn mms_velocity_jacobian(x: f64, y: f64) -> [[f64; 2]; 2] {
    [[a1(x) * a1(y), a0(x) * a2(y)], [-a2(x) * a0(y), -a1(x) * a1(y)]]
}

/// Spatial part of the pressure, `x³ − 1/4`.
pub fn pressure(x: f64, _y: f64) -> f64 {
    x * x * x - 0.25
}

pub fn pressure_gradient(x: f64, _y: f64) -> [f64; 2] {
    [3.0 * x * x, 0.0]
}

/// Spatial part of `∂ₜu* − νΔu* + ∇p*` (the whole forcing is this times `e^{−t}`).
pub fn mms_forcing(nu: f64, x: f64, y: f64) -> [f64; 2] {
    let u = mms_velocity(x, y);
    let lap = [a2(x) * a1(y) + a0(x) * a3(y), -(a3(x) * a0(y) + a1(x) * a2(y))];
    let gp = pressure_gradient(x, y);
    [-u[0] - nu * lap[0] + gp[0], -u[1] - nu * lap[1] + gp[1]]
}

/// Spatial part of the non-solenoidal velocity `a(x) a(y) (1, 1)`.
pub fn nonsolenoidal_velocity(x: f64, y: f64) -> [f64; 2] {
    let v = a0(x) * a0(y);
    [v, v]
}

pub fn nonsolenoidal_velocity_jacobian(x: f64, y: f64) -> [[f64; 2]; 2] {
    let row = [a1(x) * a0(y), a0(x) * a1(y)];
    [row, row]
}

pub fn nonsolenoidal_divergence(x: f64, y: f64) -> f64 {
    a1(x) * a0(y) + a0(x) * a1(y)
}

pub fn nonsolenoidal_forcing(nu: f64, x: f64, y: f64) -> [f64; 2] {
    let w = nonsolenoidal_velocity(x, y);
    let lap = a2(x) * a0(y) + a0(x) * a2(y);
    let gp = pressure_gradient(x, y);
    [-w[0] - nu * lap + gp[0], -w[1] - nu * lap + gp[1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn velocity_is_divergence_free_and_vanishes_on_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (x, y) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let j = mms_velocity_jacobian(x, y);
            assert!((j[0][0] + j[1][1]).abs() < 1e-12);
            let s: f64 = rng.random_range(0.0..1.0);
            for p in [[0.0, s], [1.0, s], [s, 0.0], [s, 1.0]] {
                let u = mms_velocity(p[0], p[1]);
                assert!(u[0].abs() < 1e-14 && u[1].abs() < 1e-14);
                let w = nonsolenoidal_velocity(p[0], p[1]);
                assert!(w[0].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        let (x, y) = (0.31, 0.67);
        for (f, jac) in [
            (mms_velocity as fn(f64, f64) -> [f64; 2], mms_velocity_jacobian as fn(f64, f64) -> [[f64; 2]; 2]),
            (nonsolenoidal_velocity, nonsolenoidal_velocity_jacobian),
        ] {
            let j = jac(x, y);
            for i in 0..2 {
                let dx = (f(x + h, y)[i] - f(x - h, y)[i]) / (2.0 * h);
                let dy = (f(x, y + h)[i] - f(x, y - h)[i]) / (2.0 * h);
                assert!((dx - j[i][0]).abs() < 1e-8 && (dy - j[i][1]).abs() < 1e-8);
            }
        }
        let lap = |f: fn(f64, f64) -> [f64; 2], i: usize| {
            (f(x + h, y)[i] + f(x - h, y)[i] + f(x, y + h)[i] + f(x, y - h)[i] - 4.0 * f(x, y)[i]) / (h * h)
        };
        let nu = 0.7;
        for i in 0..2 {
            let expect = -mms_velocity(x, y)[i] - nu * lap(mms_velocity, i) + pressure_gradient(x, y)[i];
            assert!((expect - mms_forcing(nu, x, y)[i]).abs() < 1e-4);
            let expect = -nonsolenoidal_velocity(x, y)[i] - nu * lap(nonsolenoidal_velocity, i) + pressure_gradient(x, y)[i];
            assert!((expect - nonsolenoidal_forcing(nu, x, y)[i]).abs() < 1e-4);
        }
        let j = nonsolenoidal_velocity_jacobian(x, y);
        assert!((j[0][0] + j[1][1] - nonsolenoidal_divergence(x, y)).abs() < 1e-15);
    }

    #[test]
    fn pressure_has_zero_mean() {
        // Gauss–Legendre in x is exact for the cubic
        let mean: f64 = crate::fem::quadrature::gauss_legendre3()
            .iter()
            .map(|(s, w)| w * pressure(*s, 0.5))
            .sum();
        assert!(mean.abs() < 1e-15);
    }
}
