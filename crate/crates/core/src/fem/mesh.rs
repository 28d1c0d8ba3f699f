use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Conductor,
    Insulator,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Conductor => "conductor",
            Region::Insulator => "insulator",
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductorBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl ConductorBox {
    pub fn square(lo: f64, hi: f64) -> Self {
        Self {
            x0: lo,
            x1: hi,
            y0: lo,
            y1: hi,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("at least 2 subdivisions are needed, got {0}")]
    TooCoarse(usize),
    #[error("conductor box sides must lie on grid lines of spacing 1/{0}")]
    BoxNotAligned(usize),
    #[error("conductor box must lie strictly inside the unit square")]
    BoxTouchesBoundary,
}

/// Geometry of one triangle: vertex coordinates, area and the constant
/// gradients of the barycentric coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleGeometry {
    pub points: [[f64; 2]; 3],
    pub area: f64,
    pub grads: [[f64; 2]; 3],
}

impl TriangleGeometry {
    pub fn new(points: [[f64; 2]; 3]) -> Self {
        let [p0, p1, p2] = points;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let inv = 1.0 / det;
        let grads = [
            [(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv],
            [(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv],
            [(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv],
        ];
        Self {
            points,
            area: 0.5 * det,
            grads,
        }
    }

    /// Cartesian point with barycentric coordinates `bary`.
    pub fn point(&self, bary: [f64; 3]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (l, v) in bary.iter().zip(&self.points) {
            p[0] += l * v[0];
            p[1] += l * v[1];
        }
        p
    }

    pub fn centroid(&self) -> [f64; 2] {
        self.point([1.0 / 3.0; 3])
    }
}

/// Local edge `j` of a triangle joins local vertices `LOCAL_EDGES[j]`
/// (edge `j` is opposite vertex `j`).
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[1, 2], [2, 0], [0, 1]];

/// Structured triangulation of the unit square.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub k: usize,
    pub vertices: Vec<[f64; 2]>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Vertex pairs `(low, high)`; the global edge orientation runs from low to high.
    pub edges: Vec<[usize; 2]>,
    /// Global edge index of each local edge.
    pub triangle_edges: Vec<[usize; 3]>,
    pub boundary_vertex: Vec<bool>,
    pub boundary_edge: Vec<bool>,
    pub regions: Option<Vec<Region>>,
}

/// `k × k` squares on `[0,1]²`, each cut by its rising diagonal into two
/// triangles. Triangles inside `conductor_box` are tagged as conductor and
/// all others as insulator; without a box there are no tags.
pub fn structured_mesh(k: usize, conductor_box: Option<ConductorBox>) -> Result<Mesh, MeshError> {
    if k < 2 {
        return Err(MeshError::TooCoarse(k));
    }
    if let Some(b) = conductor_box {
        let on_grid = |v: f64| ((v * k as f64) - (v * k as f64).round()).abs() < 1e-9;
        if !(b.x0 > 0.0 && b.y0 > 0.0 && b.x1 < 1.0 && b.y1 < 1.0) {
            return Err(MeshError::BoxTouchesBoundary);
        }
        if ![b.x0, b.x1, b.y0, b.y1].into_iter().all(on_grid) || b.x0 >= b.x1 || b.y0 >= b.y1 {
            return Err(MeshError::BoxNotAligned(k));
        }
    }
    let h = 1.0 / k as f64;
    let index = |i: usize, j: usize| j * (k + 1) + i;
    let mut vertices = Vec::with_capacity((k + 1) * (k + 1));
    let mut boundary_vertex = Vec::with_capacity((k + 1) * (k + 1));
    for j in 0..=k {
        for i in 0..=k {
            vertices.push([i as f64 * h, j as f64 * h]);
            boundary_vertex.push(i == 0 || j == 0 || i == k || j == k);
        }
    }
    let mut triangles = Vec::with_capacity(2 * k * k);
    for j in 0..k {
        for i in 0..k {
            let (v00, v10, v11, v01) = (index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    for tri in &triangles {
        let mut local = [0; 3];
        for (j, [a, b]) in LOCAL_EDGES.iter().enumerate() {
            let (p, q) = (tri[*a], tri[*b]);
            let key = [p.min(q), p.max(q)];
            local[j] = *edge_index.entry(key).or_insert_with(|| {
                edges.push(key);
                edges.len() - 1
            });
        }
        triangle_edges.push(local);
    }
    let boundary_edge = edges
        .iter()
        .map(|&[a, b]| {
            let (pa, pb) = (vertices[a], vertices[b]);
            (0..2).any(|c| (pa[c] == 0.0 && pb[c] == 0.0) || (pa[c] == 1.0 && pb[c] == 1.0))
        })
        .collect();
    let mut mesh = Mesh {
        k,
        vertices,
        triangles,
        edges,
        triangle_edges,
        boundary_vertex,
        boundary_edge,
        regions: None,
    };
    if let Some(b) = conductor_box {
        let regions = (0..mesh.triangles.len())
            .map(|t| {
                if b.contains(mesh.geometry(t).centroid()) {
                    Region::Conductor
                } else {
                    Region::Insulator
                }
            })
            .collect();
        mesh.regions = Some(regions);
    }
    Ok(mesh)
}

impl Mesh {
    pub fn h(&self) -> f64 {
        1.0 / self.k as f64
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        let [a, b, c] = self.triangles[t];
        TriangleGeometry::new([self.vertices[a], self.vertices[b], self.vertices[c]])
    }

    pub fn region(&self, t: usize) -> Option<Region> {
        self.regions.as_ref().map(|r| r[t])
    }

    /// `+1` when local edge `j` of triangle `t` runs along the global
    /// orientation (low to high vertex index), `−1` otherwise.
    pub fn edge_sign(&self, t: usize, j: usize) -> f64 {
        let tri = self.triangles[t];
        let [a, b] = LOCAL_EDGES[j];
        if tri[a] < tri[b] {
            1.0
        } else {
            -1.0
        }
    }

    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let [a, b] = self.edges[e];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
    }

    /// Writes `<stem>.nodes`, `<stem>.elements` and `<stem>.tags`.
    ///
    /// Nodes: `index x y boundary`. Elements: `index v0 v1 v2`.
    /// Tags: `index region` (every triangle `untagged` without regions).
    pub fn export(&self, dir: &Path, stem: &str) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut nodes = String::from("# index x y boundary\n");
        for (i, (p, b)) in self.vertices.iter().zip(&self.boundary_vertex).enumerate() {
            let _ = writeln!(nodes, "{i} {:e} {:e} {}", p[0], p[1], u8::from(*b));
        }
        let mut elements = String::from("# index v0 v1 v2\n");
        let mut tags = String::from("# index region\n");
        for (t, tri) in self.triangles.iter().enumerate() {
            let _ = writeln!(elements, "{t} {} {} {}", tri[0], tri[1], tri[2]);
            let tag = self.region(t).map_or("untagged", Region::as_str);
            let _ = writeln!(tags, "{t} {tag}");
        }
        fs::write(dir.join(format!("{stem}.nodes")), nodes)?;
        fs::write(dir.join(format!("{stem}.elements")), elements)?;
        fs::write(dir.join(format!("{stem}.tags")), tags)?;
        Ok(())
    }
}
