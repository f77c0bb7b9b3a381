//! Reference triangle and tetrahedron.
//!
//! Coordinates are stored in three components throughout; on the triangle the
//! third component is zero.  Local vertex indices are zero-based in code and
//! printed one-based (`v1`, `e12`, `f123`, ...).

use std::fmt;

use nalgebra::{Matrix2, Vector2, Vector3};
use rand::Rng;

use crate::error::{domain, Result};

pub type Point = Vector3<f64>;

/// Absolute tolerance used by [`ReferenceSimplex::contains`].
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolytopeKind {
    Vertex,
    Edge,
    Face,
    Cell,
}

/// A sub-polytope of a simplex, identified by its sorted vertex tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolytopeId {
    kind: PolytopeKind,
    len: usize,
    verts: [usize; 4],
}

impl PolytopeId {
    pub fn new(kind: PolytopeKind, vertices: &[usize]) -> Result<Self> {
        if vertices.is_empty() || vertices.len() > 4 {
            return domain(format!("polytope with {} vertices", vertices.len()));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return domain(format!("polytope vertices {vertices:?} are not strictly ascending"));
        }
        let expected = match kind {
            PolytopeKind::Vertex => Some(1),
            PolytopeKind::Edge => Some(2),
            PolytopeKind::Face => Some(3),
            PolytopeKind::Cell => None,
        };
        if let Some(n) = expected {
            if n != vertices.len() {
                return domain(format!("{kind:?} needs {n} vertices, got {}", vertices.len()));
            }
        } else if vertices.len() < 3 {
            return domain("a cell needs at least 3 vertices");
        }
        let mut verts = [0; 4];
        verts[..vertices.len()].copy_from_slice(vertices);
        Ok(Self { kind, len: vertices.len(), verts })
    }

    pub fn vertex(i: usize) -> Self {
        Self { kind: PolytopeKind::Vertex, len: 1, verts: [i, 0, 0, 0] }
    }

    pub fn edge(i: usize, j: usize) -> Self {
        debug_assert!(i < j);
        Self { kind: PolytopeKind::Edge, len: 2, verts: [i, j, 0, 0] }
    }

    pub fn face(i: usize, j: usize, k: usize) -> Self {
        debug_assert!(i < j && j < k);
        Self { kind: PolytopeKind::Face, len: 3, verts: [i, j, k, 0] }
    }

    pub fn kind(&self) -> PolytopeKind {
        self.kind
    }

    pub fn vertices(&self) -> &[usize] {
        &self.verts[..self.len]
    }

    /// Topological dimension (0 for a vertex).
    pub fn dim(&self) -> usize {
        self.len - 1
    }

    /// True when every vertex of `other` is a vertex of `self`.
    pub fn contains(&self, other: &PolytopeId) -> bool {
        other.vertices().iter().all(|v| self.vertices().contains(v))
    }
}

impl fmt::Display for PolytopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            PolytopeKind::Vertex => 'v',
            PolytopeKind::Edge => 'e',
            PolytopeKind::Face => 'f',
            PolytopeKind::Cell => 'c',
        };
        write!(f, "{tag}")?;
        for v in self.vertices() {
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolytopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The two reference simplices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReferenceSimplex {
    Triangle,
    Tetrahedron,
}

const TRI_VERTS: [[i64; 3]; 3] = [[0, 0, 0], [0, 1, 0], [1, 0, 0]];
const TET_VERTS: [[i64; 3]; 4] = [[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]];

impl ReferenceSimplex {
    pub fn from_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(Self::Triangle),
            3 => Ok(Self::Tetrahedron),
            _ => domain(format!("no reference simplex in dimension {dim}")),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Triangle => 2,
            Self::Tetrahedron => 3,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.dim() + 1
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Triangle => "triangle",
            Self::Tetrahedron => "tetrahedron",
        }
    }

    /// Integer coordinates of vertex `i`.
    pub fn vertex_exact(&self, i: usize) -> [i64; 3] {
        match self {
            Self::Triangle => TRI_VERTS[i],
            Self::Tetrahedron => TET_VERTS[i],
        }
    }

    pub fn vertex(&self, i: usize) -> Point {
        let v = self.vertex_exact(i);
        Point::new(v[0] as f64, v[1] as f64, v[2] as f64)
    }

    pub fn vertices(&self) -> Vec<Point> {
        (0..self.num_vertices()).map(|i| self.vertex(i)).collect()
    }

    pub fn edges(&self) -> Vec<PolytopeId> {
        let n = self.num_vertices();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(PolytopeId::edge(i, j));
            }
        }
        out
    }

    /// Two-dimensional faces; empty on the triangle.
    pub fn faces(&self) -> Vec<PolytopeId> {
        match self {
            Self::Triangle => Vec::new(),
            Self::Tetrahedron => vec![
                PolytopeId::face(0, 1, 2),
                PolytopeId::face(0, 1, 3),
                PolytopeId::face(0, 2, 3),
                PolytopeId::face(1, 2, 3),
            ],
        }
    }

    pub fn cell(&self) -> PolytopeId {
        let verts: Vec<usize> = (0..self.num_vertices()).collect();
        PolytopeId::new(PolytopeKind::Cell, &verts).expect("valid cell")
    }

    /// Codimension-one polytopes: edges of the triangle, faces of the tetrahedron.
    pub fn facets(&self) -> Vec<PolytopeId> {
        match self {
            Self::Triangle => self.edges(),
            Self::Tetrahedron => self.faces(),
        }
    }

    /// Vertices, then edges, then faces, then the cell.
    pub fn polytopes(&self) -> Vec<PolytopeId> {
        let mut out: Vec<PolytopeId> =
            (0..self.num_vertices()).map(PolytopeId::vertex).collect();
        out.extend(self.edges());
        out.extend(self.faces());
        out.push(self.cell());
        out
    }

    pub fn owns(&self, p: &PolytopeId) -> bool {
        self.polytopes().contains(p)
    }

    fn check_owned(&self, p: &PolytopeId) -> Result<()> {
        if self.owns(p) {
            Ok(())
        } else {
            domain(format!("{p} is not a polytope of the reference {}", self.name()))
        }
    }

    pub fn centroid(&self) -> Point {
        let n = self.num_vertices() as f64;
        self.vertices().iter().sum::<Point>() / n
    }

    /// Barycentric coordinates; only the first `dim + 1` entries are meaningful.
    pub fn barycentric(&self, x: &Point) -> [f64; 4] {
        match self {
            Self::Triangle => [1.0 - x.x - x.y, x.y, x.x, 0.0],
            Self::Tetrahedron => [1.0 - x.x - x.y - x.z, x.z, x.y, x.x],
        }
    }

    /// Constant gradients of the barycentric coordinates.
    pub fn barycentric_gradients(&self) -> [Vector3<f64>; 4] {
        let g = self.barycentric_gradients_exact();
        g.map(|v| Vector3::new(v[0] as f64, v[1] as f64, v[2] as f64))
    }

    pub fn barycentric_gradients_exact(&self) -> [[i64; 3]; 4] {
        match self {
            Self::Triangle => [[-1, -1, 0], [0, 1, 0], [1, 0, 0], [0, 0, 0]],
            Self::Tetrahedron => [[-1, -1, -1], [0, 0, 1], [0, 1, 0], [1, 0, 0]],
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        if self.dim() == 2 && x.z.abs() > MEMBERSHIP_TOL {
            return false;
        }
        self.barycentric(x)[..self.num_vertices()]
            .iter()
            .all(|&l| l >= -MEMBERSHIP_TOL)
    }

    pub fn point_of(&self, lambda: &[f64]) -> Point {
        lambda.iter().enumerate().map(|(i, &l)| l * self.vertex(i)).sum()
    }

    /// Random point in the relative interior of `p`, uniformly distributed.
    pub fn random_point_on<R: Rng + ?Sized>(&self, p: &PolytopeId, rng: &mut R) -> Point {
        let w: Vec<f64> = p.vertices().iter().map(|_| -rng.gen_range(1e-9f64..1.0).ln()).collect();
        let total: f64 = w.iter().sum();
        p.vertices().iter().zip(&w).map(|(&i, wi)| (wi / total) * self.vertex(i)).sum()
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        self.random_point_on(&self.cell(), rng)
    }

    /// Unnormalized tangent `v_j - v_i` of edge `(i, j)`.
    pub fn edge_tangent(&self, edge: &PolytopeId) -> Result<Point> {
        let t = self.edge_tangent_exact(edge)?;
        Ok(to_point(t))
    }

    pub fn edge_tangent_exact(&self, edge: &PolytopeId) -> Result<[i64; 3]> {
        if edge.kind() != PolytopeKind::Edge {
            return domain(format!("{edge} is not an edge"));
        }
        self.check_owned(edge)?;
        let v = edge.vertices();
        Ok(sub(self.vertex_exact(v[1]), self.vertex_exact(v[0])))
    }

    /// Outward facet normal, scaled so that the designated H(div) templates
    /// have unit normal component.
    pub fn facet_normal(&self, facet: &PolytopeId) -> Result<Point> {
        let n = self.oriented_normal_exact(facet)?;
        let n = to_point(n);
        let mid: Point = facet.vertices().iter().map(|&i| self.vertex(i)).sum::<Point>()
            / facet.vertices().len() as f64;
        if n.dot(&(self.centroid() - mid)) > 0.0 {
            Ok(-n)
        } else {
            Ok(n)
        }
    }

    /// Normal induced by the ascending vertex order of the facet.
    ///
    /// On the triangle this is `R (v_j - v_i)`; on the tetrahedron
    /// `(v_j - v_i) x (v_k - v_i)`.  Two cells that agree on the vertex order
    /// of a shared facet therefore agree on this normal after a
    /// contravariant map, which is what normal continuity needs.
    pub fn oriented_normal(&self, facet: &PolytopeId) -> Result<Point> {
        Ok(to_point(self.oriented_normal_exact(facet)?))
    }

    pub fn oriented_normal_exact(&self, facet: &PolytopeId) -> Result<[i64; 3]> {
        self.check_owned(facet)?;
        match (self, facet.kind()) {
            (Self::Triangle, PolytopeKind::Edge) => {
                let t = self.edge_tangent_exact(facet)?;
                Ok([t[1], -t[0], 0])
            }
            (Self::Tetrahedron, PolytopeKind::Face) => {
                let v = facet.vertices();
                let a = sub(self.vertex_exact(v[1]), self.vertex_exact(v[0]));
                let b = sub(self.vertex_exact(v[2]), self.vertex_exact(v[0]));
                Ok(cross(a, b))
            }
            _ => domain(format!("{facet} is not a facet of the reference {}", self.name())),
        }
    }
}

/// The constant rotation `R = [[0, 1], [-1, 0]]`.
pub fn rotation_2d() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Applies `R` to the first two components of `v`.
pub fn rotate(v: &Point) -> Point {
    let r = rotation_2d() * Vector2::new(v.x, v.y);
    Point::new(r.x, r.y, 0.0)
}

fn to_point(v: [i64; 3]) -> Point {
    Point::new(v[0] as f64, v[1] as f64, v[2] as f64)
}

fn sub(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
