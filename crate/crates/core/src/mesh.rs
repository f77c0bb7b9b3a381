//! Simplicial meshes and local-to-global degree-of-freedom maps.
//!
//! Cells keep their vertices in ascending global order.  Local vertex `k` of
//! a cell is placed on reference vertex `k`, so two cells sharing an edge or a
//! face see it with the same orientation and enumerate its functions in the
//! same order.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::element::VectorElement;
use crate::error::{domain, FemError, Result};
use crate::piola::AffineMap;
use crate::reference::{Point, PolytopeId, ReferenceSimplex};
use crate::scalar_basis::ScalarBasis;

pub const DIRICHLET: &str = "dirichlet";

/// A codimension-one face of the mesh with its one or two neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub cells: Vec<usize>,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Clone, Debug)]
pub struct SimplicialMesh {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    facets: Vec<Facet>,
    markers: Vec<(String, Vec<usize>)>,
}

impl SimplicialMesh {
    /// Builds the derived topology.  Cell vertex tuples are sorted; every
    /// facet with a single neighbour is marked [`DIRICHLET`].
    pub fn new(dim: usize, vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let simplex = ReferenceSimplex::from_dim(dim)?;
        let mut sorted = Vec::with_capacity(cells.len());
        for (c, cell) in cells.into_iter().enumerate() {
            let mut cell = cell;
            if cell.len() != dim + 1 {
                return domain(format!("cell {c} has {} vertices, expected {}", cell.len(), dim + 1));
            }
            if let Some(&v) = cell.iter().find(|&&v| v >= vertices.len()) {
                return domain(format!("cell {c} refers to missing vertex {v}"));
            }
            cell.sort_unstable();
            if cell.windows(2).any(|w| w[0] == w[1]) {
                return domain(format!("cell {c} repeats a vertex"));
            }
            let x: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
            AffineMap::from_vertices(simplex, &x)?;
            sorted.push(cell);
        }

        let mut edge_set: HashMap<[usize; 2], ()> = HashMap::new();
        let mut edges = Vec::new();
        let mut face_set: HashMap<[usize; 3], ()> = HashMap::new();
        let mut faces = Vec::new();
        let mut facet_index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut facets: Vec<Facet> = Vec::new();
        for (c, cell) in sorted.iter().enumerate() {
            for e in simplex.edges() {
                let key = [cell[e.vertices()[0]], cell[e.vertices()[1]]];
                if edge_set.insert(key, ()).is_none() {
                    edges.push(key);
                }
            }
            if dim == 3 {
                for f in simplex.faces() {
                    let v = f.vertices();
                    let key = [cell[v[0]], cell[v[1]], cell[v[2]]];
                    if face_set.insert(key, ()).is_none() {
                        faces.push(key);
                    }
                }
            }
            for f in simplex.facets() {
                let key: Vec<usize> = f.vertices().iter().map(|&k| cell[k]).collect();
                let next = facets.len();
                let idx = *facet_index.entry(key.clone()).or_insert(next);
                if idx == next {
                    facets.push(Facet { vertices: key, cells: vec![c] });
                } else {
                    facets[idx].cells.push(c);
                }
            }
        }
        if let Some(f) = facets.iter().find(|f| f.cells.len() > 2) {
            return domain(format!("facet {:?} is shared by {} cells", f.vertices, f.cells.len()));
        }
        let boundary = (0..facets.len()).filter(|&f| facets[f].is_boundary()).collect();
        Ok(Self {
            dim,
            vertices,
            cells: sorted,
            edges,
            faces,
            facets,
            markers: vec![(DIRICHLET.to_string(), boundary)],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simplex(&self) -> ReferenceSimplex {
        ReferenceSimplex::from_dim(self.dim).expect("valid mesh dimension")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Triangular faces; empty for 2D meshes.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn markers(&self) -> &[(String, Vec<usize>)] {
        &self.markers
    }

    pub fn marked_facets(&self, marker: &str) -> &[usize] {
        self.markers.iter().find(|(m, _)| m == marker).map(|(_, f)| f.as_slice()).unwrap_or(&[])
    }

    pub fn cell_vertices(&self, c: usize) -> Vec<Point> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_map(&self, c: usize) -> AffineMap {
        AffineMap::from_vertices(self.simplex(), &self.cell_vertices(c)).expect("checked at construction")
    }

    /// Unsigned cell measure.
    pub fn cell_volume(&self, c: usize) -> f64 {
        let m = self.cell_map(c);
        let fact = if self.dim == 2 { 2.0 } else { 6.0 };
        m.det().abs() / fact
    }

    /// Largest edge length.
    pub fn h(&self) -> f64 {
        self.edges
            .iter()
            .map(|[a, b]| (self.vertices[*a] - self.vertices[*b]).norm())
            .fold(0.0, f64::max)
    }

    /// Writes `v x y [z]` and `c i j k [l]` lines (zero-based indices).
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for x in &self.vertices {
            if self.dim == 2 {
                writeln!(w, "v {} {}", x.x, x.y)?;
            } else {
                writeln!(w, "v {} {} {}", x.x, x.y, x.z)?;
            }
        }
        for c in &self.cells {
            let ids: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(w, "c {}", ids.join(" "))?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(dim: usize, r: R) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut cells = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            let mut it = line.split_whitespace();
            let bad = || FemError::Domain(format!("line {}: cannot parse {line:?}", n + 1));
            match it.next() {
                Some("v") => {
                    let xs: Vec<f64> = it.map(|s| s.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                    if xs.len() != dim {
                        return Err(bad());
                    }
                    vertices.push(Point::new(xs[0], xs[1], if dim == 3 { xs[2] } else { 0.0 }));
                }
                Some("c") => {
                    let ids: Vec<usize> = it.map(|s| s.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                    cells.push(ids);
                }
                None => {}
                Some(_) => return Err(bad()),
            }
        }
        Self::new(dim, vertices, cells)
    }
}

/// `(-1, 1)^dim` cut into `n^dim` squares or cubes; squares are split along
/// the diagonal through their lowest and highest corners, cubes into the six
/// Kuhn tetrahedra sharing that diagonal.
pub fn structured_mesh(dim: usize, n: usize) -> Result<SimplicialMesh> {
    if n < 1 {
        return domain("a structured mesh needs n >= 1");
    }
    let h = 2.0 / n as f64;
    let coord = |i: usize| -1.0 + h * i as f64;
    let m = n + 1;
    match dim {
        2 => {
            let idx = |i: usize, j: usize| i + m * j;
            let mut vertices = Vec::with_capacity(m * m);
            for j in 0..m {
                for i in 0..m {
                    vertices.push(Point::new(coord(i), coord(j), 0.0));
                }
            }
            let mut cells = Vec::with_capacity(2 * n * n);
            for j in 0..n {
                for i in 0..n {
                    let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
                    cells.push(vec![v00, v10, v11]);
                    cells.push(vec![v00, v01, v11]);
                }
            }
            SimplicialMesh::new(2, vertices, cells)
        }
        3 => {
            let idx = |i: usize, j: usize, k: usize| i + m * (j + m * k);
            let mut vertices = Vec::with_capacity(m * m * m);
            for k in 0..m {
                for j in 0..m {
                    for i in 0..m {
                        vertices.push(Point::new(coord(i), coord(j), coord(k)));
                    }
                }
            }
            const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let mut cells = Vec::with_capacity(6 * n * n * n);
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        for perm in PERMS {
                            let mut at = [i, j, k];
                            let mut cell = vec![idx(at[0], at[1], at[2])];
                            for axis in perm {
                                at[axis] += 1;
                                cell.push(idx(at[0], at[1], at[2]));
                            }
                            cells.push(cell);
                        }
                    }
                }
            }
            SimplicialMesh::new(3, vertices, cells)
        }
        _ => domain(format!("structured meshes exist in 2D and 3D, not {dim}D")),
    }
}

/// Anything that lists, per local function, the reference polytope its
/// global degree of freedom lives on.
pub trait LocalLayout {
    fn simplex(&self) -> ReferenceSimplex;
    fn associations(&self) -> Vec<PolytopeId>;
}

impl LocalLayout for ScalarBasis {
    fn simplex(&self) -> ReferenceSimplex {
        ScalarBasis::simplex(self)
    }

    fn associations(&self) -> Vec<PolytopeId> {
        self.functions().iter().map(|f| f.polytope).collect()
    }
}

impl LocalLayout for VectorElement {
    fn simplex(&self) -> ReferenceSimplex {
        VectorElement::simplex(self)
    }

    fn associations(&self) -> Vec<PolytopeId> {
        self.functions().iter().map(|f| f.association).collect()
    }
}

/// Global identity of a degree of freedom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DofKey {
    /// Ascending global vertex indices of the polytope.
    pub polytope: Vec<usize>,
    /// Position among the functions of that polytope.
    pub ordinal: usize,
}

#[derive(Clone, Debug)]
pub struct DofMap {
    local: usize,
    cell_dofs: Vec<usize>,
    signs: Vec<i8>,
    keys: Vec<DofKey>,
    boundary: Vec<(String, Vec<usize>)>,
}

impl DofMap {
    pub fn num_dofs(&self) -> usize {
        self.keys.len()
    }

    pub fn local_size(&self) -> usize {
        self.local
    }

    pub fn num_cells(&self) -> usize {
        self.cell_dofs.len() / self.local.max(1)
    }

    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.cell_dofs[c * self.local..(c + 1) * self.local]
    }

    pub fn cell_signs(&self, c: usize) -> &[i8] {
        &self.signs[c * self.local..(c + 1) * self.local]
    }

    pub fn key(&self, dof: usize) -> &DofKey {
        &self.keys[dof]
    }

    pub fn keys(&self) -> &[DofKey] {
        &self.keys
    }

    pub fn boundary_dofs(&self, marker: &str) -> &[usize] {
        self.boundary.iter().find(|(m, _)| m == marker).map(|(_, d)| d.as_slice()).unwrap_or(&[])
    }
}

pub fn build_dof_map<E: LocalLayout + ?Sized>(mesh: &SimplicialMesh, element: &E) -> Result<DofMap> {
    if element.simplex() != mesh.simplex() {
        return domain(format!("{} element on a {}D mesh", element.simplex().name(), mesh.dim()));
    }
    let assoc = element.associations();
    let mut ordinal = vec![0; assoc.len()];
    for i in 0..assoc.len() {
        ordinal[i] = assoc[..i].iter().filter(|p| **p == assoc[i]).count();
    }
    let local = assoc.len();
    let mut index: HashMap<DofKey, usize> = HashMap::new();
    let mut keys = Vec::new();
    let mut cell_dofs = Vec::with_capacity(local * mesh.num_cells());
    for cell in mesh.cells() {
        for (p, &o) in assoc.iter().zip(&ordinal) {
            let key = DofKey { polytope: p.vertices().iter().map(|&k| cell[k]).collect(), ordinal: o };
            let next = keys.len();
            let d = *index.entry(key.clone()).or_insert(next);
            if d == next {
                keys.push(key);
            }
            cell_dofs.push(d);
        }
    }
    let mut boundary = Vec::new();
    for (marker, facets) in &mesh.markers {
        let mut on = vec![false; keys.len()];
        for &f in facets {
            let fv = &mesh.facets[f].vertices;
            let c = mesh.facets[f].cells[0];
            for &d in &cell_dofs[c * local..(c + 1) * local] {
                if keys[d].polytope.iter().all(|v| fv.contains(v)) {
                    on[d] = true;
                }
            }
        }
        boundary.push((marker.clone(), (0..keys.len()).filter(|&d| on[d]).collect()));
    }
    let signs = vec![1; cell_dofs.len()];
    Ok(DofMap { local, cell_dofs, signs, keys, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_basis::ScalarFamily;
    use crate::templates::VectorFamily;
    use proptest::prelude::*;

    fn unit_square() -> SimplicialMesh {
        structured_mesh(2, 1).unwrap()
    }

    #[test]
    fn structured_counts() {
        let m = unit_square();
        assert_eq!((m.vertices().len(), m.num_cells(), m.edges().len()), (4, 2, 5));
        let m = structured_mesh(2, 2).unwrap();
        assert_eq!((m.vertices().len(), m.num_cells()), (9, 8));
        let m = structured_mesh(3, 1).unwrap();
        assert_eq!((m.vertices().len(), m.num_cells()), (8, 6));
        assert_eq!(m.edges().len(), 19);
        assert_eq!(m.faces().len(), 18);
        assert!(structured_mesh(2, 0).is_err());
        assert!(structured_mesh(4, 1).is_err());
    }

    #[test]
    fn volumes_fill_the_box() {
        for (dim, n, vol) in [(2, 3, 4.0), (3, 2, 8.0)] {
            let m = structured_mesh(dim, n).unwrap();
            let total: f64 = (0..m.num_cells()).map(|c| m.cell_volume(c)).sum();
            assert!((total - vol).abs() < 1e-12);
        }
    }

    #[test]
    fn facets_have_one_or_two_cells() {
        for (dim, n) in [(2, 3), (3, 2)] {
            let m = structured_mesh(dim, n).unwrap();
            let boundary = m.marked_facets(DIRICHLET).len();
            let expected = if dim == 2 { 4 * n } else { 6 * 2 * n * n };
            assert_eq!(boundary, expected);
            for f in m.facets() {
                let on_box = (0..dim).any(|a| f.vertices.iter().all(|&v| (m.vertices()[v][a].abs() - 1.0).abs() < 1e-12));
                assert_eq!(f.is_boundary(), on_box);
            }
        }
    }

    #[test]
    fn dof_counts_on_two_cells() {
        let m = unit_square();
        let s = ReferenceSimplex::Triangle;
        let n1 = VectorElement::new(VectorFamily::N1, 0, s, ScalarFamily::Lagrange).unwrap();
        assert_eq!(build_dof_map(&m, &n1).unwrap().num_dofs(), 5);
        let n2 = VectorElement::new(VectorFamily::N2, 1, s, ScalarFamily::Lagrange).unwrap();
        assert_eq!(build_dof_map(&m, &n2).unwrap().num_dofs(), 10);
        let l2 = ScalarBasis::new(ScalarFamily::Lagrange, 2, s).unwrap();
        assert_eq!(build_dof_map(&m, &l2).unwrap().num_dofs(), 9);
    }

    #[test]
    fn boundary_dofs() {
        let m = structured_mesh(3, 1).unwrap();
        let l1 = ScalarBasis::new(ScalarFamily::Lagrange, 1, ReferenceSimplex::Tetrahedron).unwrap();
        let d = build_dof_map(&m, &l1).unwrap();
        assert_eq!(d.boundary_dofs(DIRICHLET).len(), 8);
        let m = unit_square();
        let n1 = VectorElement::new(VectorFamily::N1, 0, ReferenceSimplex::Triangle, ScalarFamily::Lagrange).unwrap();
        let d = build_dof_map(&m, &n1).unwrap();
        assert_eq!(d.boundary_dofs(DIRICHLET).len(), 4);
        assert!(d.boundary_dofs("neumann").is_empty());
    }

    #[test]
    fn mismatched_dimension_is_rejected() {
        let l1 = ScalarBasis::new(ScalarFamily::Lagrange, 1, ReferenceSimplex::Tetrahedron).unwrap();
        assert!(build_dof_map(&unit_square(), &l1).is_err());
    }

    #[test]
    fn bad_cells_are_rejected() {
        let v = vec![Point::zeros(), Point::new(1.0, 0.0, 0.0), Point::new(2.0, 0.0, 0.0)];
        assert!(SimplicialMesh::new(2, v.clone(), vec![vec![0, 1, 2]]).is_err());
        assert!(SimplicialMesh::new(2, v.clone(), vec![vec![0, 1, 7]]).is_err());
        assert!(SimplicialMesh::new(2, v, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = structured_mesh(3, 2).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("v -1 -1 -1\n"));
        assert!(text.lines().any(|l| l.starts_with("c ")));
        let back = SimplicialMesh::read_text(3, buf.as_slice()).unwrap();
        assert_eq!(back.cells(), m.cells());
        assert_eq!(back.vertices(), m.vertices());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn dof_counts_follow_euler(n in 1usize..6, p in 1usize..4) {
            let m = structured_mesh(2, n).unwrap();
            let b = ScalarBasis::new(ScalarFamily::Bernstein, p, ReferenceSimplex::Triangle).unwrap();
            let d = build_dof_map(&m, &b).unwrap();
            let expected = m.vertices().len() + m.edges().len() * (p - 1) + m.num_cells() * (p - 1) * p.saturating_sub(2) / 2;
            prop_assert_eq!(d.num_dofs(), expected);
            let interior = d.num_dofs() - d.boundary_dofs(DIRICHLET).len();
            let k = n * p - 1;
            prop_assert_eq!(interior, k * k);
        }
    }
}
