//! Data of the two-dimensional eddy-current model with an interior conductor.

use crate::fem::{Coefficient, ConductorBox, Mesh, Region};

/// Smooth bump `exp(1 − 1/(1 − (r/ρ)²))` centred at `(0.5, 0.5)` with
/// radius `ρ = 0.4`, used as the applied field `H₀`.
pub fn applied_field(x: f64, y: f64) -> f64 {
    let rho = 0.4;
    let s = ((x - 0.5).powi(2) + (y - 0.5).powi(2)) / (rho * rho);
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s)).exp()
    }
}

/// Physical coefficients; the conductor values vary linearly across the
/// conductor box between their bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EddyCoefficients {
    pub sigma: (f64, f64),
    pub mu: (f64, f64),
    pub eps: (f64, f64),
}

fn box_coordinates(b: &ConductorBox, p: [f64; 2]) -> (f64, f64) {
    ((p[0] - b.x0) / (b.x1 - b.x0), (p[1] - b.y0) / (b.y1 - b.y0))
}

impl EddyCoefficients {
    /// `(σ, μ, ε)` per triangle: `σ` grows with x and `μ`, `ε` with y
    /// inside the conductor; outside, `σ = 0`, `μ = μ₀`, `ε = ε₀`.
    pub fn per_triangle(&self, mesh: &Mesh, conductor: &ConductorBox) -> (Coefficient, Coefficient, Coefficient) {
        let n = mesh.num_triangles();
        let (mut sigma, mut mu, mut eps) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for t in 0..n {
            if mesh.region(t) == Some(Region::Conductor) {
                let (sx, sy) = box_coordinates(conductor, mesh.geometry(t).centroid());
                sigma.push(self.sigma.0 + (self.sigma.1 - self.sigma.0) * sx);
                mu.push(self.mu.0 + (self.mu.1 - self.mu.0) * sy);
                eps.push(self.eps.0 + (self.eps.1 - self.eps.0) * sy);
            } else {
                sigma.push(0.0);
                mu.push(self.mu.0);
                eps.push(self.eps.0);
            }
        }
        (
            Coefficient::PerTriangle(sigma),
            Coefficient::PerTriangle(mu),
            Coefficient::PerTriangle(eps),
        )
    }
}
