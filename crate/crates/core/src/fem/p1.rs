use super::assembly::Coefficient;
use super::mesh::Mesh;
use crate::linalg::{SparseMatrix, TripletBuilder};

/// P1 mass matrix over all vertices, `(|T|/12)·[[2,1,1],[1,2,1],[1,1,2]]`
/// per triangle scaled by the coefficient.
pub fn assemble_p1_mass(mesh: &Mesh, coefficient: &Coefficient) -> SparseMatrix {
    let n = mesh.num_vertices();
    let mut builder = TripletBuilder::new(n, n);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let c = coefficient.at(mesh, t);
        if c == 0.0 {
            continue;
        }
        let scale = c * mesh.geometry(t).area / 12.0;
        for i in 0..3 {
            for j in 0..3 {
                builder.add(tri[i], tri[j], if i == j { 2.0 * scale } else { scale });
            }
        }
    }
    builder.build().expect("assembled indices are in range")
}

/// P1 stiffness matrix over all vertices, `|T| ∇λᵢ·∇λⱼ` per triangle scaled
/// by the coefficient.
pub fn assemble_p1_stiffness(mesh: &Mesh, coefficient: &Coefficient) -> SparseMatrix {
    let n = mesh.num_vertices();
    let mut builder = TripletBuilder::new(n, n);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let c = coefficient.at(mesh, t);
        if c == 0.0 {
            continue;
        }
        let geo = mesh.geometry(t);
        for i in 0..3 {
            for j in 0..3 {
                let g = geo.grads[i][0] * geo.grads[j][0] + geo.grads[i][1] * geo.grads[j][1];
                builder.add(tri[i], tri[j], c * geo.area * g);
            }
        }
    }
    builder.build().expect("assembled indices are in range")
}
