use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, Vector3};

use super::assembly::max_degree;
use super::{DiscreteSystem, Discretization, ManufacturedSolution};
use crate::error::{domain, FemError, Result};
use crate::mesh::{DofMap, LocalLayout, DIRICHLET};
use crate::quadrature;
use crate::reference::{Point, PolytopeId, PolytopeKind};
use crate::scalar_basis::ScalarFamily;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Block {
    U,
    P,
}

/// Prescribes the boundary values of both fields on every facet marked
/// [`DIRICHLET`]: nodal values for Lagrange displacements, and otherwise
/// L2 projections of the trace, vertices first, then edges, then faces.
pub fn apply_dirichlet(system: &mut DiscreteSystem, disc: &Discretization, ms: &ManufacturedSolution) -> Result<()> {
    if system.rhs.len() != disc.num_dofs() {
        return domain("system and discretization sizes differ");
    }
    let mut values = vec![None; disc.num_dofs()];
    project(disc, ms, Block::U, true, &mut values)?;
    project(disc, ms, Block::P, true, &mut values)?;
    for (i, v) in values.into_iter().enumerate() {
        if v.is_some() {
            system.constraints[i] = v;
        }
    }
    Ok(())
}

/// Coefficients of the interpolant of the exact fields: nodal for Lagrange
/// displacements, hierarchical L2 projection of traces otherwise.  Exact for
/// fields inside the discrete space.
pub fn interpolate(disc: &Discretization, ms: &ManufacturedSolution) -> Result<Vec<f64>> {
    let mut values = vec![None; disc.num_dofs()];
    project(disc, ms, Block::U, false, &mut values)?;
    project(disc, ms, Block::P, false, &mut values)?;
    Ok(values.into_iter().map(|v| v.unwrap_or(0.0)).collect())
}

/// Points and weights of a rule on the reference sub-polytope `q`.
fn polytope_rule(disc: &Discretization, q: &PolytopeId, degree: usize) -> Result<Vec<(Point, f64)>> {
    let s = disc.mesh.simplex();
    let v: Vec<Point> = q.vertices().iter().map(|&k| s.vertex(k)).collect();
    let k = q.dim();
    if k == 0 {
        return Ok(vec![(v[0], 1.0)]);
    }
    let rule = quadrature::rule(k, degree.min(quadrature::max_degree(k)))?;
    Ok(rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| {
            let mut p = v[0];
            for c in 0..k {
                p += (v[k - c] - v[0]) * x[c];
            }
            (p, *w)
        })
        .collect())
}

fn project(disc: &Discretization, ms: &ManufacturedSolution, block: Block, boundary_only: bool, out: &mut [Option<f64>]) -> Result<()> {
    let dofs: &DofMap = match block {
        Block::U => &disc.dofs_u,
        Block::P => &disc.dofs_p,
    };
    let assoc = match block {
        Block::U => disc.h1.associations(),
        Block::P => disc.hcurl.associations(),
    };
    let wanted: Vec<usize> = if boundary_only {
        dofs.boundary_dofs(DIRICHLET).to_vec()
    } else {
        (0..dofs.num_dofs()).collect()
    };
    let mut groups: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for &d in &wanted {
        let poly = dofs.key(d).polytope.clone();
        groups.entry((poly.len(), poly)).or_default().push(d);
    }
    let mut owner: HashMap<&[usize], usize> = HashMap::new();
    for c in 0..disc.mesh.num_cells() {
        for &d in dofs.cell_dofs(c) {
            let poly = dofs.key(d).polytope.as_slice();
            if groups.contains_key(&(poly.len(), poly.to_vec())) {
                owner.entry(poly).or_insert(c);
            }
        }
    }
    let rows = disc.rows();
    let nodal = block == Block::U && disc.h1.family() == ScalarFamily::Lagrange;
    let nodes = disc.h1.nodes();
    let degree = 2 * max_degree(disc) + 4;
    let index = |r: usize, d: usize| match block {
        Block::U => disc.index_u(r, d),
        Block::P => disc.index_p(r, d),
    };

    for (_, poly) in groups.keys() {
        let c = owner[poly.as_slice()];
        let cell = &disc.mesh.cells()[c];
        let local_verts: Vec<usize> = poly.iter().map(|v| cell.iter().position(|w| w == v).expect("owner cell")).collect();
        let kind = match local_verts.len() {
            1 => PolytopeKind::Vertex,
            2 => PolytopeKind::Edge,
            n if n == disc.mesh.dim() + 1 => PolytopeKind::Cell,
            _ => PolytopeKind::Face,
        };
        let lq = PolytopeId::new(kind, &local_verts)?;
        let cell_dofs = dofs.cell_dofs(c);
        let unknown: Vec<usize> = (0..assoc.len()).filter(|&i| assoc[i] == lq).collect();
        let known: Vec<usize> = (0..assoc.len()).filter(|&i| assoc[i] != lq && lq.contains(&assoc[i])).collect();
        let map = disc.mesh.cell_map(c);

        if nodal {
            for &i in &unknown {
                let x = map.map_point(&nodes[i]);
                let u = (ms.u)(&x);
                for r in 0..rows {
                    out[index(r, cell_dofs[i])] = Some(u[r]);
                }
            }
            continue;
        }

        // Trace operator on the physical polytope.
        let jac = map.jacobian();
        let s = disc.mesh.simplex();
        let lv: Vec<Point> = local_verts.iter().map(|&k| jac * s.vertex(k)).collect();
        let trace = |v: Vector3<f64>| -> Vector3<f64> {
            match (block, lq.dim()) {
                (Block::U, _) => v,
                (_, 1) => {
                    let t = (lv[1] - lv[0]).normalize();
                    t * t.dot(&v)
                }
                (_, 2) if disc.mesh.dim() == 3 => {
                    let n = (lv[1] - lv[0]).cross(&(lv[2] - lv[0])).normalize();
                    v - n * n.dot(&v)
                }
                _ => v,
            }
        };
        let pts = polytope_rule(disc, &lq, degree)?;
        let nu = unknown.len();
        let mut gram = DMatrix::<f64>::zeros(nu, nu);
        let mut rhs = DMatrix::<f64>::zeros(nu, rows);
        for (xi, w) in &pts {
            let x = map.map_point(xi);
            let basis: Vec<Vector3<f64>> = match block {
                Block::U => disc.h1.tabulate(xi, false).values.iter().map(|&v| Vector3::new(v, 0.0, 0.0)).collect(),
                Block::P => disc.hcurl.tabulate(xi).values.iter().map(|v| trace(map.covariant_push(v))).collect(),
            };
            let target: Vec<Vector3<f64>> = match block {
                Block::U => {
                    let u = (ms.u)(&x);
                    (0..rows).map(|r| Vector3::new(u[r], 0.0, 0.0)).collect()
                }
                Block::P => {
                    let p = (ms.p)(&x);
                    (0..rows).map(|r| trace(p.row(r).transpose())).collect()
                }
            };
            for (a, &i) in unknown.iter().enumerate() {
                for (b, &j) in unknown.iter().enumerate() {
                    gram[(a, b)] += w * basis[i].dot(&basis[j]);
                }
                for r in 0..rows {
                    let mut t = target[r];
                    for &k in &known {
                        let ck = out[index(r, cell_dofs[k])].ok_or_else(|| {
                            FemError::Domain(format!("coefficient on a sub-polytope of {poly:?} is missing"))
                        })?;
                        t -= basis[k] * ck;
                    }
                    rhs[(a, r)] += w * basis[i].dot(&t);
                }
            }
        }
        let sol = gram
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&rhs))
            .ok_or_else(|| FemError::Domain(format!("trace functions on {poly:?} are linearly dependent")))?;
        for (a, &i) in unknown.iter().enumerate() {
            for r in 0..rows {
                out[index(r, cell_dofs[i])] = Some(sol[(a, r)]);
            }
        }
    }
    Ok(())
}
