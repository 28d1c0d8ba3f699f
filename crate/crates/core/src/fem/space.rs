use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::mesh::{Mesh, Region, TriangleGeometry, LOCAL_EDGES};
use super::quadrature::{gauss_legendre3, triangle_degree6};
use crate::linalg::{LinalgError, SparseMatrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    /// Continuous piecewise-linear scalars, one dof per vertex.
    P1Scalar,
    /// Continuous piecewise-quadratic vectors; all x-components first,
    /// then all y-components, each ordered vertices then edge midpoints.
    P2Vector,
    /// Lowest-order edge (Whitney) elements, one tangential dof per edge.
    EdgeLowestOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    L2,
    H1Seminorm,
    H1,
    HCurl,
}

type ValueFn<'a> = Box<dyn Fn(f64, f64) -> [f64; 2] + 'a>;
type JacobianFn<'a> = Box<dyn Fn(f64, f64) -> [[f64; 2]; 2] + 'a>;

/// Analytic field with its Jacobian `jacobian[i][j] = ∂ⱼ uᵢ`. Scalar
/// fields live in the first component.
pub struct ExactField<'a> {
    value: ValueFn<'a>,
    jacobian: JacobianFn<'a>,
}

impl<'a> ExactField<'a> {
    pub fn scalar(value: impl Fn(f64, f64) -> f64 + 'a, gradient: impl Fn(f64, f64) -> [f64; 2] + 'a) -> Self {
        Self {
            value: Box::new(move |x, y| [value(x, y), 0.0]),
            jacobian: Box::new(move |x, y| [gradient(x, y), [0.0, 0.0]]),
        }
    }

    pub fn vector(
        value: impl Fn(f64, f64) -> [f64; 2] + 'a,
        jacobian: impl Fn(f64, f64) -> [[f64; 2]; 2] + 'a,
    ) -> Self {
        Self {
            value: Box::new(value),
            jacobian: Box::new(jacobian),
        }
    }

    pub fn zero() -> Self {
        Self::vector(|_, _| [0.0; 2], |_, _| [[0.0; 2]; 2])
    }

    pub fn value(&self, x: f64, y: f64) -> [f64; 2] {
        (self.value)(x, y)
    }

    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        (self.jacobian)(x, y)
    }
}

/// Values and Jacobians of the local basis functions at one point.
#[derive(Clone, Debug, Default)]
pub(crate) struct LocalBasis {
    pub values: Vec<[f64; 2]>,
    pub jacobians: Vec<[[f64; 2]; 2]>,
}

impl LocalBasis {
    fn clear(&mut self) {
        self.values.clear();
        self.jacobians.clear();
    }
}

pub(crate) fn curl(j: &[[f64; 2]; 2]) -> f64 {
    j[1][0] - j[0][1]
}

/// Global (full) dof indices of triangle `t`, in local basis order.
pub(crate) fn local_dofs(kind: SpaceKind, mesh: &Mesh, t: usize) -> Vec<usize> {
    let tri = mesh.triangles[t];
    let edges = mesh.triangle_edges[t];
    match kind {
        SpaceKind::P1Scalar => tri.to_vec(),
        SpaceKind::EdgeLowestOrder => edges.to_vec(),
        SpaceKind::P2Vector => {
            let nv = mesh.num_vertices();
            let ns = nv + mesh.num_edges();
            let scalar: Vec<usize> = tri.iter().copied().chain(edges.iter().map(|e| nv + e)).collect();
            scalar.iter().copied().chain(scalar.iter().map(|s| ns + s)).collect()
        }
    }
}

/// Evaluates the local basis of triangle `t` at barycentric point `bary`.
pub(crate) fn eval_local(
    kind: SpaceKind,
    mesh: &Mesh,
    t: usize,
    geo: &TriangleGeometry,
    bary: [f64; 3],
    out: &mut LocalBasis,
) {
    out.clear();
    let g = &geo.grads;
    match kind {
        SpaceKind::P1Scalar => {
            for i in 0..3 {
                out.values.push([bary[i], 0.0]);
                out.jacobians.push([g[i], [0.0, 0.0]]);
            }
        }
        SpaceKind::EdgeLowestOrder => {
            for (j, [a, b]) in LOCAL_EDGES.iter().enumerate() {
                let s = mesh.edge_sign(t, j);
                let (la, lb) = (bary[*a], bary[*b]);
                let (ga, gb) = (g[*a], g[*b]);
                out.values.push([s * (la * gb[0] - lb * ga[0]), s * (la * gb[1] - lb * ga[1])]);
                let mut jac = [[0.0; 2]; 2];
                for (i, row) in jac.iter_mut().enumerate() {
                    for (c, entry) in row.iter_mut().enumerate() {
                        *entry = s * (ga[c] * gb[i] - gb[c] * ga[i]);
                    }
                }
                out.jacobians.push(jac);
            }
        }
        SpaceKind::P2Vector => {
            let mut scalar_values = [0.0; 6];
            let mut scalar_grads = [[0.0; 2]; 6];
            for i in 0..3 {
                scalar_values[i] = bary[i] * (2.0 * bary[i] - 1.0);
                let f = 4.0 * bary[i] - 1.0;
                scalar_grads[i] = [f * g[i][0], f * g[i][1]];
            }
            for (j, [a, b]) in LOCAL_EDGES.iter().enumerate() {
                scalar_values[3 + j] = 4.0 * bary[*a] * bary[*b];
                scalar_grads[3 + j] = [
                    4.0 * (bary[*a] * g[*b][0] + bary[*b] * g[*a][0]),
                    4.0 * (bary[*a] * g[*b][1] + bary[*b] * g[*a][1]),
                ];
            }
            for c in 0..2 {
                for s in 0..6 {
                    let mut value = [0.0; 2];
                    value[c] = scalar_values[s];
                    let mut jac = [[0.0; 2]; 2];
                    jac[c] = scalar_grads[s];
                    out.values.push(value);
                    out.jacobians.push(jac);
                }
            }
        }
    }
}

/// A finite-element space on a mesh together with the map from full dofs
/// to reduced (free) dofs. Dirichlet-eliminated dofs map to `None`;
/// grouped dofs share one reduced index.
#[derive(Clone, Debug)]
pub struct FeSpace {
    kind: SpaceKind,
    mesh: Arc<Mesh>,
    support: Option<Region>,
    map: Vec<Option<usize>>,
    reduced_dofs: usize,
}

impl FeSpace {
    pub fn full_dof_count(kind: SpaceKind, mesh: &Mesh) -> usize {
        match kind {
            SpaceKind::P1Scalar => mesh.num_vertices(),
            SpaceKind::P2Vector => 2 * (mesh.num_vertices() + mesh.num_edges()),
            SpaceKind::EdgeLowestOrder => mesh.num_edges(),
        }
    }

    /// General constructor; `map` has one entry per full dof and the
    /// reduced indices must cover `0..reduced_dofs`.
    pub fn with_map(
        kind: SpaceKind,
        mesh: Arc<Mesh>,
        support: Option<Region>,
        map: Vec<Option<usize>>,
    ) -> Self {
        assert_eq!(map.len(), Self::full_dof_count(kind, &mesh), "dof map length");
        let reduced_dofs = map.iter().flatten().map(|&i| i + 1).max().unwrap_or(0);
        Self {
            kind,
            mesh,
            support,
            map,
            reduced_dofs,
        }
    }

    fn eliminate(kind: SpaceKind, mesh: Arc<Mesh>, fixed: impl Fn(usize) -> bool) -> Self {
        let mut next = 0;
        let map = (0..Self::full_dof_count(kind, &mesh))
            .map(|d| {
                if fixed(d) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        Self::with_map(kind, mesh, None, map)
    }

    /// P1 with every vertex free.
    pub fn p1(mesh: Arc<Mesh>) -> Self {
        Self::eliminate(SpaceKind::P1Scalar, mesh, |_| false)
    }

    /// P1 vanishing on the boundary.
    pub fn p1_dirichlet(mesh: Arc<Mesh>) -> Self {
        let m = mesh.clone();
        Self::eliminate(SpaceKind::P1Scalar, mesh, move |v| m.boundary_vertex[v])
    }

    /// Vector P2 vanishing on the boundary.
    pub fn p2_vector_dirichlet(mesh: Arc<Mesh>) -> Self {
        let m = mesh.clone();
        let nv = m.num_vertices();
        let ns = nv + m.num_edges();
        Self::eliminate(SpaceKind::P2Vector, mesh, move |d| {
            let s = d % ns;
            if s < nv {
                m.boundary_vertex[s]
            } else {
                m.boundary_edge[s - nv]
            }
        })
    }

    /// Edge elements with vanishing tangential trace on the boundary.
    pub fn edge_dirichlet(mesh: Arc<Mesh>) -> Self {
        let m = mesh.clone();
        Self::eliminate(SpaceKind::EdgeLowestOrder, mesh, move |e| m.boundary_edge[e])
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn support(&self) -> Option<Region> {
        self.support
    }

    pub fn full_dofs(&self) -> usize {
        self.map.len()
    }

    pub fn reduced_dofs(&self) -> usize {
        self.reduced_dofs
    }

    pub fn dof_map(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn constrained_dofs(&self) -> usize {
        self.map.iter().filter(|m| m.is_none()).count()
    }

    /// Full coefficients from reduced ones (eliminated dofs are zero).
    pub fn expand(&self, reduced: &Vector) -> Vector {
        Vector::from_fn(self.full_dofs(), |d, _| self.map[d].map_or(0.0, |r| reduced[r]))
    }

    /// Reduced coefficients read off a full vector; for grouped dofs the
    /// first member wins.
    pub fn restrict(&self, full: &Vector) -> Vector {
        let mut out = Vector::zeros(self.reduced_dofs);
        let mut seen = vec![false; self.reduced_dofs];
        for (d, r) in self.map.iter().enumerate() {
            if let Some(r) = *r {
                if !seen[r] {
                    out[r] = full[d];
                    seen[r] = true;
                }
            }
        }
        out
    }

    /// Reduced load vector: eliminated entries are dropped and grouped
    /// entries summed.
    pub fn reduce_vector(&self, full: &Vector) -> Vector {
        let mut out = Vector::zeros(self.reduced_dofs);
        for (d, r) in self.map.iter().enumerate() {
            if let Some(r) = *r {
                out[r] += full[d];
            }
        }
        out
    }

    /// `∫ f · φᵢ` for every full dof (scalar spaces use `f[0]`).
    pub fn load_vector(&self, f: impl Fn(f64, f64) -> [f64; 2]) -> Vector {
        super::assembly::assemble_load(&self.mesh, self.kind, |t| self.in_support(t), |p, shape| {
            let v = f(p[0], p[1]);
            v[0] * shape.value[0] + v[1] * shape.value[1]
        })
    }

    /// `∫ h curl φᵢ` for every full dof.
    pub fn curl_load_vector(&self, h: impl Fn(f64, f64) -> f64) -> Vector {
        super::assembly::assemble_load(&self.mesh, self.kind, |t| self.in_support(t), |p, shape| {
            h(p[0], p[1]) * curl(shape.jacobian)
        })
    }

    /// `∫ s div φᵢ` for every full dof.
    pub fn divergence_load_vector(&self, s: impl Fn(f64, f64) -> f64) -> Vector {
        super::assembly::assemble_load(&self.mesh, self.kind, |t| self.in_support(t), |p, shape| {
            s(p[0], p[1]) * (shape.jacobian[0][0] + shape.jacobian[1][1])
        })
    }

    /// Applies the dof map on both sides of a full square matrix.
    pub fn reduce_matrix(&self, full: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        full.map_indices(self.reduced_dofs, self.reduced_dofs, &self.map, &self.map)
    }

    fn in_support(&self, t: usize) -> bool {
        match self.support {
            None => true,
            Some(region) => self.mesh.region(t) == Some(region),
        }
    }

    /// Canonical interpolant (full coefficients): nodal values for P1 and
    /// P2, tangential line integrals for edge elements.
    pub fn interpolate(&self, field: &ExactField) -> Vector {
        let mesh = &self.mesh;
        match self.kind {
            SpaceKind::P1Scalar => Vector::from_fn(mesh.num_vertices(), |v, _| {
                let p = mesh.vertices[v];
                field.value(p[0], p[1])[0]
            }),
            SpaceKind::P2Vector => {
                let nv = mesh.num_vertices();
                let ns = nv + mesh.num_edges();
                let node = |s: usize| if s < nv { mesh.vertices[s] } else { mesh.edge_midpoint(s - nv) };
                Vector::from_fn(2 * ns, |d, _| {
                    let p = node(d % ns);
                    field.value(p[0], p[1])[d / ns]
                })
            }
            SpaceKind::EdgeLowestOrder => Vector::from_fn(mesh.num_edges(), |e, _| {
                let [a, b] = mesh.edges[e];
                let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
                let d = [pb[0] - pa[0], pb[1] - pa[1]];
                gauss_legendre3()
                    .iter()
                    .map(|(s, w)| {
                        let v = field.value(pa[0] + s * d[0], pa[1] + s * d[1]);
                        w * (v[0] * d[0] + v[1] * d[1])
                    })
                    .sum()
            }),
        }
    }

    /// Error between the finite-element function with full coefficients
    /// `coeffs` and `exact`, by the degree-6 rule on every triangle of the
    /// space's support.
    pub fn error_norm(&self, coeffs: &Vector, exact: &ExactField, kind: NormKind) -> f64 {
        let mesh = &self.mesh;
        let rule = triangle_degree6();
        let mut basis = LocalBasis::default();
        let mut total = 0.0;
        for t in 0..mesh.num_triangles() {
            if !self.in_support(t) {
                continue;
            }
            let geo = mesh.geometry(t);
            let dofs = local_dofs(self.kind, mesh, t);
            for q in &rule {
                eval_local(self.kind, mesh, t, &geo, q.bary, &mut basis);
                let mut value = [0.0; 2];
                let mut jac = [[0.0; 2]; 2];
                for (i, &d) in dofs.iter().enumerate() {
                    let c = coeffs[d];
                    for r in 0..2 {
                        value[r] += c * basis.values[i][r];
                        for s in 0..2 {
                            jac[r][s] += c * basis.jacobians[i][r][s];
                        }
                    }
                }
                let p = geo.point(q.bary);
                let ev = exact.value(p[0], p[1]);
                let ej = exact.jacobian(p[0], p[1]);
                let l2 = (value[0] - ev[0]).powi(2) + (value[1] - ev[1]).powi(2);
                let semi: f64 = (0..2)
                    .flat_map(|r| (0..2).map(move |s| (r, s)))
                    .map(|(r, s)| (jac[r][s] - ej[r][s]).powi(2))
                    .sum();
                let curl_err = (curl(&jac) - curl(&ej)).powi(2);
                let density = match kind {
                    NormKind::L2 => l2,
                    NormKind::H1Seminorm => semi,
                    NormKind::H1 => l2 + semi,
                    NormKind::HCurl => l2 + curl_err,
                };
                total += q.weight * geo.area * density;
            }
        }
        total.max(0.0).sqrt()
    }

    /// Norm of the finite-element function with full coefficients `coeffs`.
    pub fn norm(&self, coeffs: &Vector, kind: NormKind) -> f64 {
        self.error_norm(coeffs, &ExactField::zero(), kind)
    }
}

/// `sqrt(cᵀ G c)` for a sparse Gram matrix.
pub fn gram_norm(gram: &SparseMatrix, coeffs: &Vector) -> Result<f64, LinalgError> {
    Ok(coeffs.dot(&gram.mul_vec(coeffs)?).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::structured_mesh;

    #[test]
    fn constant_has_unit_l2_norm() {
        let space = FeSpace::p1(Arc::new(structured_mesh(3, None).unwrap()));
        let one = space.interpolate(&ExactField::scalar(|_, _| 1.0, |_, _| [0.0, 0.0]));
        assert!((space.norm(&one, NormKind::L2) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn p2_reproduces_quadratics() {
        let space = FeSpace::p2_vector_dirichlet(Arc::new(structured_mesh(3, None).unwrap()));
        let field = ExactField::vector(|x, y| [x * x, x * y], |x, y| [[2.0 * x, 0.0], [y, x]]);
        let u = space.interpolate(&field);
        assert!(space.error_norm(&u, &field, NormKind::H1) < 1e-12);
    }

    #[test]
    fn edge_interpolation_reproduces_constants_and_curl() {
        let space = FeSpace::edge_dirichlet(Arc::new(structured_mesh(4, None).unwrap()));
        // Whitney elements contain a + b × x, here (1 − y, 2 + x) with curl 2
        let field = ExactField::vector(|x, y| [1.0 - y, 2.0 + x], |_, _| [[0.0, -1.0], [1.0, 0.0]]);
        let u = space.interpolate(&field);
        assert!(space.error_norm(&u, &field, NormKind::HCurl) < 1e-13);
    }

    #[test]
    fn dirichlet_maps() {
        let mesh = Arc::new(structured_mesh(2, None).unwrap());
        assert_eq!(FeSpace::p1_dirichlet(mesh.clone()).reduced_dofs(), 1);
        assert_eq!(FeSpace::p2_vector_dirichlet(mesh.clone()).reduced_dofs(), 2 * 9);
        assert_eq!(FeSpace::edge_dirichlet(mesh).reduced_dofs(), 8);
        let v = Vector::from_vec(vec![5.0]);
        let space = FeSpace::p1_dirichlet(Arc::new(structured_mesh(2, None).unwrap()));
        let full = space.expand(&v);
        assert_eq!(full[4], 5.0);
        assert_eq!(full.sum(), 5.0);
        assert_eq!(space.restrict(&full), v);
    }
}
