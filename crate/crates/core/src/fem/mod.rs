//! Structured triangulations of the unit square and finite-element
//! assembly: P1 scalars, Taylor–Hood (vector P2 / P1) and lowest-order
//! edge elements.

mod assembly;
mod edge;
mod mesh;
mod p1;
mod p2;
pub mod quadrature;
mod space;

pub use assembly::Coefficient;
pub use edge::{assemble_edge2d, EddyAssembly, EddyError};
pub use mesh::{structured_mesh, ConductorBox, Mesh, MeshError, Region, TriangleGeometry, LOCAL_EDGES};
pub use p1::{assemble_p1_mass, assemble_p1_stiffness};
pub use p2::{assemble_stokes, StokesAssembly};
pub use space::{gram_norm, ExactField, FeSpace, NormKind, SpaceKind};
