use std::sync::Arc;

use super::assembly::{assemble_form, divergence, dot, frobenius, Coefficient};
use super::mesh::Mesh;
use super::p1::assemble_p1_mass;
use super::quadrature::triangle_degree4;
use super::space::{FeSpace, SpaceKind};
use crate::linalg::{DenseMatrix, LinalgError, SparseMatrix, Vector};

/// Taylor–Hood discretization of the Stokes operator on a mesh.
///
/// Velocities vanish on the boundary. Pressures are P1 restricted to zero
/// mean: the last vertex value is eliminated through
/// `p_last = −Σ wᵢ pᵢ / w_last` with `w = Mp·1`, which is the
/// [`deflation`](Self::deflation) basis change `p = D p̂`.
#[derive(Clone, Debug)]
pub struct StokesAssembly {
    pub nu: f64,
    pub velocity: FeSpace,
    pub pressure: FeSpace,
    /// `ν ∫ ∇u : ∇v` on free velocity dofs.
    pub stiffness: SparseMatrix,
    /// `∫ u · v` on free velocity dofs.
    pub mass: SparseMatrix,
    /// `∫ ∇u : ∇v` on free velocity dofs (Gram matrix of the H¹ seminorm).
    pub h1_seminorm_gram: SparseMatrix,
    /// `∫ ∇u : ∇v + u · v` on free velocity dofs.
    pub h1_gram: SparseMatrix,
    /// `−∫ q div v`, deflated pressure rows × free velocity columns.
    pub divergence: SparseMatrix,
    /// Deflated pressure mass `Dᵀ Mp D`.
    pub pressure_mass: SparseMatrix,
    /// `D`, full pressure vertices × deflated pressure dofs.
    pub deflation: SparseMatrix,
    /// Unit-viscosity vector stiffness over all velocity dofs.
    pub full_stiffness: SparseMatrix,
    pub full_mass: SparseMatrix,
    /// `−∫ q div v` over all pressure and velocity dofs.
    pub full_divergence: SparseMatrix,
    pub full_pressure_mass: SparseMatrix,
}

fn deflation_basis(pressure_mass: &SparseMatrix) -> DenseMatrix {
    let n = pressure_mass.rows();
    let w = pressure_mass.mul_vec(&Vector::from_element(n, 1.0)).expect("square");
    let mut d = DenseMatrix::zeros(n, n - 1);
    for i in 0..n - 1 {
        d[(i, i)] = 1.0;
        d[(n - 1, i)] = -w[i] / w[n - 1];
    }
    d
}

pub fn assemble_stokes(mesh: Arc<Mesh>, nu: f64) -> Result<StokesAssembly, LinalgError> {
    let rule = triangle_degree4();
    let one = Coefficient::Constant(1.0);
    let velocity = FeSpace::p2_vector_dirichlet(mesh.clone());
    let pressure = FeSpace::p1(mesh.clone());
    let full_stiffness = assemble_form(&mesh, SpaceKind::P2Vector, SpaceKind::P2Vector, &one, &rule, |v, u| {
        frobenius(v.jacobian, u.jacobian)
    });
    let full_mass = assemble_form(&mesh, SpaceKind::P2Vector, SpaceKind::P2Vector, &one, &rule, |v, u| {
        dot(v.value, u.value)
    });
    let full_divergence = assemble_form(&mesh, SpaceKind::P1Scalar, SpaceKind::P2Vector, &one, &rule, |q, v| {
        -q.value[0] * divergence(v.jacobian)
    });
    let full_pressure_mass = assemble_p1_mass(&mesh, &one);

    let h1_seminorm_gram = velocity.reduce_matrix(&full_stiffness)?;
    let mass = velocity.reduce_matrix(&full_mass)?;
    let h1_gram = h1_seminorm_gram.add(&mass)?;
    let stiffness = h1_seminorm_gram.scale(nu);

    let np = pressure.full_dofs();
    let identity: Vec<Option<usize>> = (0..np).map(Some).collect();
    let b_free = full_divergence
        .map_indices(np, velocity.reduced_dofs(), &identity, velocity.dof_map())?
        .to_dense();
    let d = deflation_basis(&full_pressure_mass);
    let divergence = SparseMatrix::from_dense(&(d.transpose() * b_free))?;
    let pressure_mass = SparseMatrix::from_dense(&(d.transpose() * full_pressure_mass.to_dense() * &d))?;
    Ok(StokesAssembly {
        nu,
        velocity,
        pressure,
        stiffness,
        mass,
        h1_seminorm_gram,
        h1_gram,
        divergence,
        pressure_mass,
        deflation: SparseMatrix::from_dense(&d)?,
        full_stiffness,
        full_mass,
        full_divergence,
        full_pressure_mass,
    })
}

impl StokesAssembly {
    /// Full vertex pressures from deflated coefficients.
    pub fn expand_pressure(&self, deflated: &Vector) -> Vector {
        self.deflation.mul_vec(deflated).expect("deflation shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::structured_mesh;
    use crate::fem::space::ExactField;

    #[test]
    fn divergence_of_boundary_free_field_has_zero_mean() {
        let mesh = Arc::new(structured_mesh(3, None).unwrap());
        let s = assemble_stokes(mesh, 1.0).unwrap();
        let field = ExactField::vector(
            |x, y| [x * x * (1.0 - x) * y * (1.0 - y), (x + y) * x * (1.0 - x) * y * (1.0 - y)],
            |_, _| [[0.0; 2]; 2],
        );
        let v = s.velocity.interpolate(&field);
        let v = s.velocity.expand(&s.velocity.restrict(&v));
        let ones = Vector::from_element(s.pressure.full_dofs(), 1.0);
        let pairing = ones.dot(&s.full_divergence.mul_vec(&v).unwrap());
        assert!(pairing.abs() < 1e-14, "{pairing}");
    }

    #[test]
    fn translations_have_no_stiffness_energy() {
        let mesh = Arc::new(structured_mesh(2, None).unwrap());
        let s = assemble_stokes(mesh, 1.0).unwrap();
        let v = s.velocity.interpolate(&ExactField::vector(|_, _| [1.0, -2.0], |_, _| [[0.0; 2]; 2]));
        assert!(s.full_stiffness.mul_vec(&v).unwrap().amax() < 1e-13);
    }

    #[test]
    fn deflated_pressures_have_zero_mean() {
        let mesh = Arc::new(structured_mesh(4, None).unwrap());
        let s = assemble_stokes(mesh, 1.0).unwrap();
        let q = s.expand_pressure(&Vector::from_fn(s.pressure.full_dofs() - 1, |i, _| (i as f64).sin()));
        let ones = Vector::from_element(s.pressure.full_dofs(), 1.0);
        assert!(ones.dot(&s.full_pressure_mass.mul_vec(&q).unwrap()).abs() < 1e-14);
        for m in [&s.stiffness, &s.mass, &s.h1_gram, &s.pressure_mass] {
            assert!(m.relative_asymmetry() < 1e-13);
        }
    }
}
