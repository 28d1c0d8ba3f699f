use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::assembly::{assemble_form, dot, Coefficient};
use super::mesh::{Mesh, Region};
use super::p1::{assemble_p1_mass, assemble_p1_stiffness};
use super::quadrature::triangle_degree4;
use super::space::{curl, FeSpace, SpaceKind};
use crate::linalg::{LinalgError, SparseMatrix, TripletBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EddyError {
    #[error("mesh has no conductor region")]
    EmptyConductor,
    #[error("the insulator region is not connected")]
    DisconnectedInsulator,
    #[error("mesh carries no region tags")]
    Untagged,
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Edge-element discretization of the degenerate eddy-current model in 2D.
///
/// The primal unknown lives in lowest-order edge elements with zero
/// tangential trace. The multiplier space is P1 on the insulator, zero on
/// the outer boundary and constant on each connected component of the
/// conductor interface (one grouped dof per component).
#[derive(Clone, Debug)]
pub struct EddyAssembly {
    pub primal: FeSpace,
    pub multiplier: FeSpace,
    /// `∫ (1/μ) curl u curl v`
    pub curl_curl: SparseMatrix,
    /// `∫_C σ u · v`
    pub sigma_mass: SparseMatrix,
    /// `∫_D ε v · ∇μ`, multiplier rows × primal columns.
    pub constraint: SparseMatrix,
    /// `∫ curl u curl v + u · v`
    pub hcurl_gram: SparseMatrix,
    /// `∫ u · v`
    pub l2_gram: SparseMatrix,
    /// `∫_D ∇μ · ∇ψ + μ ψ`
    pub multiplier_gram: SparseMatrix,
    /// `∫_D ε ∇μ · ∇ψ`
    pub multiplier_stiffness: SparseMatrix,
    /// Edge interpolant of `∇μ̃`, where `μ̃` extends a multiplier into the
    /// conductor by its interface constant: primal rows × multiplier columns.
    pub gradient: SparseMatrix,
    /// Vertices of each connected interface component.
    pub interface_groups: Vec<Vec<usize>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = i;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn check_coefficients(mesh: &Mesh, regions: &[Region], sigma: &Coefficient, mu: &Coefficient, eps: &Coefficient) -> Result<(), EddyError> {
    for (t, region) in regions.iter().enumerate() {
        let s = sigma.at(mesh, t);
        match region {
            Region::Conductor if !(s > 0.0 && s.is_finite()) => {
                return Err(EddyError::InvalidCoefficient(format!("sigma must be positive in the conductor (triangle {t})")))
            }
            Region::Insulator if s != 0.0 => {
                return Err(EddyError::InvalidCoefficient(format!("sigma must vanish in the insulator (triangle {t})")))
            }
            _ => {}
        }
        for (name, c) in [("mu", mu), ("eps", eps)] {
            let v = c.at(mesh, t);
            if !(v > 0.0 && v.is_finite()) {
                return Err(EddyError::InvalidCoefficient(format!("{name} must be positive (triangle {t})")));
            }
        }
    }
    Ok(())
}

pub fn assemble_edge2d(
    mesh: Arc<Mesh>,
    sigma: &Coefficient,
    mu: &Coefficient,
    eps: &Coefficient,
) -> Result<EddyAssembly, EddyError> {
    let regions = mesh.regions.clone().ok_or(EddyError::Untagged)?;
    if !regions.contains(&Region::Conductor) {
        return Err(EddyError::EmptyConductor);
    }
    check_coefficients(&mesh, &regions, sigma, mu, eps)?;
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();

    let mut edge_triangles: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_edges()];
    for (t, edges) in mesh.triangle_edges.iter().enumerate() {
        for &e in edges {
            edge_triangles[e].push(t);
        }
    }

    let mut insulator_links = UnionFind::new(nt);
    for tris in &edge_triangles {
        if let [a, b] = tris[..] {
            if regions[a] == Region::Insulator && regions[b] == Region::Insulator {
                insulator_links.union(a, b);
            }
        }
    }
    let insulator: Vec<usize> = (0..nt).filter(|&t| regions[t] == Region::Insulator).collect();
    if let Some(&first) = insulator.first() {
        let root = insulator_links.find(first);
        if insulator.iter().any(|&t| insulator_links.find(t) != root) {
            return Err(EddyError::DisconnectedInsulator);
        }
    }

    let mut in_insulator = vec![false; nv];
    let mut in_conductor = vec![false; nv];
    let mut conductor_links = UnionFind::new(nv);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let flags = if regions[t] == Region::Conductor { &mut in_conductor } else { &mut in_insulator };
        for &v in tri {
            flags[v] = true;
        }
        if regions[t] == Region::Conductor {
            conductor_links.union(tri[0], tri[1]);
            conductor_links.union(tri[1], tri[2]);
        }
    }
    let interface = |v: usize| in_insulator[v] && in_conductor[v];

    let mut interface_links = UnionFind::new(nv);
    for (e, tris) in edge_triangles.iter().enumerate() {
        if let [a, b] = tris[..] {
            if regions[a] != regions[b] {
                let [p, q] = mesh.edges[e];
                interface_links.union(p, q);
            }
        }
    }
    let mut group_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut interface_groups: Vec<Vec<usize>> = Vec::new();
    for v in (0..nv).filter(|&v| interface(v)) {
        let root = interface_links.find(v);
        let g = *group_of_root.entry(root).or_insert_with(|| {
            interface_groups.push(Vec::new());
            interface_groups.len() - 1
        });
        interface_groups[g].push(v);
    }

    let free: Vec<usize> = (0..nv)
        .filter(|&v| in_insulator[v] && !interface(v) && !mesh.boundary_vertex[v])
        .collect();
    let n_free = free.len();
    let mut map: Vec<Option<usize>> = vec![None; nv];
    for (i, &v) in free.iter().enumerate() {
        map[v] = Some(i);
    }
    for (g, members) in interface_groups.iter().enumerate() {
        for &v in members {
            map[v] = Some(n_free + g);
        }
    }
    // Conductor-interior vertices inherit the constant of the interface
    // component bordering their conductor component.
    let mut conductor_group: BTreeMap<usize, usize> = BTreeMap::new();
    for (g, members) in interface_groups.iter().enumerate() {
        for &v in members {
            conductor_group.entry(conductor_links.find(v)).or_insert(n_free + g);
        }
    }
    let extension: Vec<Option<usize>> = (0..nv)
        .map(|v| {
            if in_conductor[v] && !interface(v) {
                conductor_group.get(&conductor_links.find(v)).copied()
            } else {
                map[v]
            }
        })
        .collect();

    let primal = FeSpace::edge_dirichlet(mesh.clone());
    let multiplier = FeSpace::with_map(SpaceKind::P1Scalar, mesh.clone(), Some(Region::Insulator), map.clone());
    let nm = multiplier.reduced_dofs();

    let rule = triangle_degree4();
    let edge = SpaceKind::EdgeLowestOrder;
    let inv_mu = Coefficient::PerTriangle((0..nt).map(|t| 1.0 / mu.at(&mesh, t)).collect());
    let eps_insulator = Coefficient::PerTriangle(
        (0..nt)
            .map(|t| if regions[t] == Region::Insulator { eps.at(&mesh, t) } else { 0.0 })
            .collect(),
    );
    let insulator_indicator = Coefficient::PerRegion {
        conductor: 0.0,
        insulator: 1.0,
    };
    let one = Coefficient::Constant(1.0);

    let curl_form = |v: super::assembly::Shape, u: super::assembly::Shape| curl(v.jacobian) * curl(u.jacobian);
    let curl_curl = primal.reduce_matrix(&assemble_form(&mesh, edge, edge, &inv_mu, &rule, curl_form))?;
    let sigma_mass = primal.reduce_matrix(&assemble_form(&mesh, edge, edge, sigma, &rule, |v, u| dot(v.value, u.value)))?;
    let l2_gram = primal.reduce_matrix(&assemble_form(&mesh, edge, edge, &one, &rule, |v, u| dot(v.value, u.value)))?;
    let unit_curl = primal.reduce_matrix(&assemble_form(&mesh, edge, edge, &one, &rule, curl_form))?;
    let hcurl_gram = unit_curl.add(&l2_gram)?;

    let constraint_full = assemble_form(&mesh, SpaceKind::P1Scalar, edge, &eps_insulator, &rule, |q, u| {
        dot(&q.jacobian[0], u.value)
    });
    let constraint = constraint_full.map_indices(nm, primal.reduced_dofs(), &map, primal.dof_map())?;
    let multiplier_stiffness = multiplier.reduce_matrix(&assemble_p1_stiffness(&mesh, &eps_insulator))?;
    let multiplier_gram = multiplier.reduce_matrix(
        &assemble_p1_stiffness(&mesh, &insulator_indicator).add(&assemble_p1_mass(&mesh, &insulator_indicator))?,
    )?;

    let mut gradient = TripletBuilder::new(primal.reduced_dofs(), nm);
    for (e, &[low, high]) in mesh.edges.iter().enumerate() {
        let Some(row) = primal.dof_map()[e] else { continue };
        if let Some(c) = extension[high] {
            gradient.add(row, c, 1.0);
        }
        if let Some(c) = extension[low] {
            gradient.add(row, c, -1.0);
        }
    }

    Ok(EddyAssembly {
        primal,
        multiplier,
        curl_curl,
        sigma_mass,
        constraint,
        hcurl_gram,
        l2_gram,
        multiplier_gram,
        multiplier_stiffness,
        gradient: gradient.build()?,
        interface_groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::{structured_mesh, ConductorBox};

    fn assembly(k: usize) -> EddyAssembly {
        let mesh = Arc::new(structured_mesh(k, Some(ConductorBox::square(0.25, 0.75))).unwrap());
        assemble_edge2d(
            mesh,
            &Coefficient::PerRegion {
                conductor: 2.0,
                insulator: 0.0,
            },
            &Coefficient::Constant(1.0),
            &Coefficient::Constant(1.5),
        )
        .unwrap()
    }

    #[test]
    fn gradients_are_curl_free_and_reproduce_the_weighted_stiffness() {
        let a = assembly(8);
        let g = a.gradient.to_dense();
        assert!((a.curl_curl.to_dense() * &g).amax() < 1e-10);
        let bg = a.constraint.to_dense() * &g;
        assert!((bg - a.multiplier_stiffness.to_dense()).amax() < 1e-10);
        assert_eq!(a.interface_groups.len(), 1);
    }

    #[test]
    fn sigma_mass_vanishes_away_from_the_conductor() {
        let a = assembly(4);
        let mesh = a.primal.mesh();
        let regions = mesh.regions.as_ref().unwrap();
        let mut touches = vec![false; mesh.num_edges()];
        for (t, edges) in mesh.triangle_edges.iter().enumerate() {
            for &e in edges {
                touches[e] |= regions[t] == Region::Conductor;
            }
        }
        for (e, row) in a.primal.dof_map().iter().enumerate() {
            if let (Some(r), false) = (row, touches[e]) {
                assert!(a.sigma_mass.row(*r).all(|(_, v)| v == 0.0));
            }
        }
    }

    #[test]
    fn missing_conductor_is_rejected() {
        let mesh = Arc::new(structured_mesh(4, None).unwrap());
        let one = Coefficient::Constant(1.0);
        assert_eq!(assemble_edge2d(mesh, &one, &one, &one).unwrap_err(), EddyError::Untagged);
    }
}
