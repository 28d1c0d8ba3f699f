use super::mesh::{Mesh, Region};
use super::quadrature::QuadPoint;
use super::space::{eval_local, local_dofs, LocalBasis, SpaceKind};
use crate::linalg::{SparseMatrix, TripletBuilder, Vector};

/// Piecewise-constant coefficient.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// Untagged triangles take the insulator value.
    PerRegion { conductor: f64, insulator: f64 },
    PerTriangle(Vec<f64>),
}

impl Coefficient {
    pub fn at(&self, mesh: &Mesh, t: usize) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::PerRegion { conductor, insulator } => match mesh.region(t) {
                Some(Region::Conductor) => *conductor,
                _ => *insulator,
            },
            Coefficient::PerTriangle(values) => values[t],
        }
    }
}

/// Basis function data handed to a bilinear form integrand.
pub(crate) struct Shape<'a> {
    pub value: &'a [f64; 2],
    pub jacobian: &'a [[f64; 2]; 2],
}

/// Assembles `Σ_T c_T ∫_T form(ψ_row, φ_col)` over all full dofs, skipping
/// triangles with a zero coefficient. Entries are merged in triangle order.
pub(crate) fn assemble_form(
    mesh: &Mesh,
    row_kind: SpaceKind,
    col_kind: SpaceKind,
    coefficient: &Coefficient,
    rule: &[QuadPoint],
    form: impl Fn(Shape, Shape) -> f64,
) -> SparseMatrix {
    let rows = super::space::FeSpace::full_dof_count(row_kind, mesh);
    let cols = super::space::FeSpace::full_dof_count(col_kind, mesh);
    let mut builder = TripletBuilder::new(rows, cols);
    let mut row_basis = LocalBasis::default();
    let mut col_basis = LocalBasis::default();
    for t in 0..mesh.num_triangles() {
        let c = coefficient.at(mesh, t);
        if c == 0.0 {
            continue;
        }
        let geo = mesh.geometry(t);
        let row_dofs = local_dofs(row_kind, mesh, t);
        let col_dofs = local_dofs(col_kind, mesh, t);
        let mut local = vec![0.0; row_dofs.len() * col_dofs.len()];
        for q in rule {
            eval_local(row_kind, mesh, t, &geo, q.bary, &mut row_basis);
            eval_local(col_kind, mesh, t, &geo, q.bary, &mut col_basis);
            let w = c * q.weight * geo.area;
            for i in 0..row_dofs.len() {
                for j in 0..col_dofs.len() {
                    local[i * col_dofs.len() + j] += w * form(
                        Shape {
                            value: &row_basis.values[i],
                            jacobian: &row_basis.jacobians[i],
                        },
                        Shape {
                            value: &col_basis.values[j],
                            jacobian: &col_basis.jacobians[j],
                        },
                    );
                }
            }
        }
        for (i, &r) in row_dofs.iter().enumerate() {
            for (j, &cdof) in col_dofs.iter().enumerate() {
                builder.add(r, cdof, local[i * col_dofs.len() + j]);
            }
        }
    }
    builder.build().expect("assembled indices are in range")
}

pub(crate) fn dot(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn frobenius(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

pub(crate) fn divergence(j: &[[f64; 2]; 2]) -> f64 {
    j[0][0] + j[1][1]
}

/// `∫ integrand(x, y, φᵢ)` for every full dof `i` of the given kind, over
/// triangles accepted by `filter`, using the degree-6 rule.
pub(crate) fn assemble_load(
    mesh: &Mesh,
    kind: SpaceKind,
    filter: impl Fn(usize) -> bool,
    integrand: impl Fn([f64; 2], Shape) -> f64,
) -> Vector {
    let rule = super::quadrature::triangle_degree6();
    let mut out = Vector::zeros(super::space::FeSpace::full_dof_count(kind, mesh));
    let mut basis = LocalBasis::default();
    for t in 0..mesh.num_triangles() {
        if !filter(t) {
            continue;
        }
        let geo = mesh.geometry(t);
        let dofs = local_dofs(kind, mesh, t);
        for q in &rule {
            eval_local(kind, mesh, t, &geo, q.bary, &mut basis);
            let p = geo.point(q.bary);
            let w = q.weight * geo.area;
            for (i, &d) in dofs.iter().enumerate() {
                out[d] += w * integrand(
                    p,
                    Shape {
                        value: &basis.values[i],
                        jacobian: &basis.jacobians[i],
                    },
                );
            }
        }
    }
    out
}
