//! Arbitrary-order H(curl)- and H(div)-conforming vector elements on
//! triangles and tetrahedra, built by tensoring polytopal template vectors
//! with H1 scalar bases, together with the machinery to map them to meshes
//! and to verify them on relaxed micromorphic model problems.

pub mod element;
pub mod error;
pub mod mesh;
pub mod piola;
pub mod quadrature;
pub mod reference;
pub mod rmm;
pub mod scalar_basis;
pub mod sparse;
pub mod templates;
pub mod verify;

pub use element::{element_dimension, ElementTabulation, FunctionKind, VectorBasisFunction, VectorElement};
pub use error::{FemError, Result};
pub use mesh::{build_dof_map, structured_mesh, DofMap, SimplicialMesh};
pub use piola::AffineMap;
pub use quadrature::{rule as quadrature_rule, QuadratureRule};
pub use reference::{Point, PolytopeId, PolytopeKind, ReferenceSimplex};
pub use rmm::{
    apply_dirichlet, assemble_antiplane, assemble_rmm3d, interpolate, l2_error, DiscreteSystem, Discretization,
    ManufacturedSolution, MaterialParams2D, MaterialParams3D, Pairing,
};
pub use scalar_basis::{ScalarBasis, ScalarFamily};
pub use sparse::{CsrMatrix, SolveReport, SolverKind};
pub use templates::{lowest_order_fields, template_set, Space, TemplateField, TemplateSet, VectorFamily};
pub use verify::{ConvergenceReport, Problem};
