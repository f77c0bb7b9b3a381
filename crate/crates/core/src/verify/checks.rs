use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::{element_dimension, FunctionKind, VectorElement};
use crate::error::{domain, Result};
use crate::mesh::{build_dof_map, SimplicialMesh};
use crate::piola::AffineMap;
use crate::quadrature;
use crate::reference::{Point, ReferenceSimplex};
use crate::scalar_basis::{scalar_dimension, ScalarBasis, ScalarFamily};
use crate::templates::{Space, VectorFamily};

/// Relative singular value below which a direction counts as lost.
pub const RANK_TOLERANCE: f64 = 1e-8;

fn rank_of(m: &DMatrix<f64>, rel: f64) -> (usize, f64) {
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return (0, 0.0);
    }
    let rank = sv.iter().filter(|&&s| s > rel * max).count();
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    (rank, min / max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankOutcome {
    pub rank: usize,
    pub expected: usize,
    /// Smallest over largest singular value.
    pub ratio: f64,
}

impl RankOutcome {
    pub fn full(&self) -> bool {
        self.rank == self.expected
    }
}

/// Rank of the matrix whose rows are the functions sampled at `len()` random
/// interior points, all components stacked.
pub fn unisolvence(el: &VectorElement, seed: u64) -> RankOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = el.simplex();
    let d = s.dim();
    let n = el.len();
    let mut m = DMatrix::zeros(n, n * d);
    for k in 0..n {
        let x = s.random_point(&mut rng);
        let t = el.tabulate(&x);
        for i in 0..n {
            for c in 0..d {
                m[(i, k * d + c)] = t.values[i][c];
            }
        }
    }
    let (rank, ratio) = rank_of(&m, RANK_TOLERANCE);
    RankOutcome { rank, expected: element_dimension(el.family(), el.order(), s).unwrap_or(n), ratio }
}

/// Dimension of the range of curl (H(curl)) or div (H(div)) on the element.
pub fn derivative_range_dimension(family: VectorFamily, p: usize, simplex: ReferenceSimplex) -> usize {
    let dp = |k: isize| if k < 0 { 0 } else { scalar_dimension(simplex, k as usize) };
    let p = p as isize;
    match (simplex, family) {
        (ReferenceSimplex::Triangle, VectorFamily::N1 | VectorFamily::Rt) => dp(p),
        (ReferenceSimplex::Triangle, _) => dp(p - 1),
        (ReferenceSimplex::Tetrahedron, VectorFamily::N1) => 3 * dp(p) - dp(p - 1),
        (ReferenceSimplex::Tetrahedron, VectorFamily::N2) => 3 * dp(p - 1) - dp(p - 2),
        (ReferenceSimplex::Tetrahedron, _) => dp(p - 1),
    }
}

/// Sampled rank of the curls (H(curl)) or divergences (H(div)) of all functions.
pub fn derivative_rank(el: &VectorElement, seed: u64) -> RankOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = el.simplex();
    let comps: Vec<usize> = match (el.space(), s.dim()) {
        (Space::HCurl, 3) => vec![0, 1, 2],
        _ => vec![0],
    };
    let n = el.len();
    let pts = 2 * n;
    let mut m = DMatrix::zeros(n, pts * comps.len());
    for k in 0..pts {
        let t = el.tabulate(&s.random_point(&mut rng));
        for i in 0..n {
            let v = match el.space() {
                Space::HCurl if s.dim() == 3 => t.curl(i),
                Space::HCurl => Vector3::new(t.curl(i).z, 0.0, 0.0),
                Space::HDiv => Vector3::new(t.div(i), 0.0, 0.0),
            };
            for (a, &c) in comps.iter().enumerate() {
                m[(i, k * comps.len() + a)] = v[c];
            }
        }
    }
    let (rank, ratio) = rank_of(&m, 1e-9);
    RankOutcome { rank, expected: derivative_range_dimension(el.family(), el.order(), s), ratio }
}

/// Largest pointwise curl of a gradient-kind function and divergence of a
/// curl-kind function, with the number of such functions.
pub fn kernel_residual(el: &VectorElement, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx: Vec<usize> = (0..el.len()).filter(|&i| el.functions()[i].kind.is_kernel()).collect();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let t = el.tabulate(&el.simplex().random_point(&mut rng));
        for &i in &idx {
            let r = match el.functions()[i].kind {
                FunctionKind::Gradient => t.curl(i).norm(),
                _ => t.div(i).abs(),
            };
            worst = worst.max(r);
        }
    }
    (worst, idx.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConformityOutcome {
    /// Largest trace jump over the interface, relative to the largest trace.
    pub max_jump: f64,
    pub trials: usize,
    pub positive_det: bool,
    pub negative_det: bool,
}

/// Two random cells sharing a facet, relabelled in every vertex order so
/// that all local placements of the interface occur.
fn two_cell_meshes(dim: usize, seed: u64) -> Vec<SimplicialMesh> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = dim + 2;
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..nv {
        let mut next = Vec::new();
        for p in &perms {
            for k in (0..nv).filter(|k| !p.contains(k)) {
                next.push([p.as_slice(), &[k]].concat());
            }
        }
        perms = next;
    }
    let shared: Vec<usize> = (0..dim).collect();
    let mut out = Vec::with_capacity(perms.len());
    for perm in perms {
        loop {
            let pts: Vec<Point> = (0..nv)
                .map(|_| {
                    let mut p = Point::zeros();
                    for c in 0..dim {
                        p[c] = rng.gen_range(-1.0..1.0);
                    }
                    p
                })
                .collect();
            let cells: Vec<Vec<usize>> = [dim, dim + 1]
                .iter()
                .map(|&apex| shared.iter().copied().chain([apex]).collect())
                .collect();
            let vol = |c: &[usize]| {
                let e: Vec<Point> = c[1..].iter().map(|&k| pts[k] - pts[c[0]]).collect();
                if dim == 2 {
                    e[0].x * e[1].y - e[0].y * e[1].x
                } else {
                    e[0].dot(&e[1].cross(&e[2]))
                }
            };
            let (v0, v1) = (vol(&cells[0]), vol(&cells[1]));
            let min = if dim == 2 { 0.1 } else { 0.02 };
            if v0.abs() < min || v1.abs() < min || v0 * v1 > 0.0 {
                continue;
            }
            let mut verts = vec![Point::zeros(); nv];
            for (k, &label) in perm.iter().enumerate() {
                verts[label] = pts[k];
            }
            let cells = cells.iter().map(|c| c.iter().map(|&k| perm[k]).collect()).collect();
            out.push(SimplicialMesh::new(dim, verts, cells).expect("valid two-cell mesh"));
            break;
        }
    }
    out
}

/// Trace jump of every global basis function across the interface of
/// randomly placed two-cell meshes, at 10 points of the shared facet.
pub fn conformity(el: &VectorElement, seed: u64) -> Result<ConformityOutcome> {
    let dim = el.simplex().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let meshes = two_cell_meshes(dim, seed);
    let mut out = ConformityOutcome { max_jump: 0.0, trials: meshes.len(), positive_det: false, negative_det: false };
    for mesh in &meshes {
        let dofs = build_dof_map(mesh, el)?;
        let Some(facet) = mesh.facets().iter().find(|f| f.cells.len() == 2) else {
            return domain("two-cell mesh without an interior facet");
        };
        let fv: Vec<Point> = facet.vertices.iter().map(|&v| mesh.vertices()[v]).collect();
        let normal = if dim == 2 {
            let t = fv[1] - fv[0];
            Vector3::new(t.y, -t.x, 0.0).normalize()
        } else {
            (fv[1] - fv[0]).cross(&(fv[2] - fv[0])).normalize()
        };
        let trace = |v: Vector3<f64>| -> Vector3<f64> {
            match (el.space(), dim) {
                (Space::HDiv, _) => Vector3::new(normal.dot(&v), 0.0, 0.0),
                (Space::HCurl, 2) => Vector3::new(normal.y * v.x - normal.x * v.y, 0.0, 0.0),
                (Space::HCurl, _) => normal.cross(&v),
            }
        };
        let maps: Vec<AffineMap> = (0..2).map(|c| mesh.cell_map(c)).collect();
        for m in &maps {
            if m.det() > 0.0 {
                out.positive_det = true;
            } else {
                out.negative_det = true;
            }
        }
        let (mut jump, mut scale) = (0.0f64, 0.0f64);
        for _ in 0..10 {
            let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            let x: Point = fv.iter().zip(&w).map(|(p, wk)| p * (wk / total)).sum();
            let mut traces = vec![vec![Vector3::zeros(); dofs.num_dofs()]; 2];
            for c in 0..2 {
                let t = el.tabulate(&maps[c].pull_point(&x));
                for (i, &d) in dofs.cell_dofs(c).iter().enumerate() {
                    let v = match el.space() {
                        Space::HCurl => maps[c].covariant_push(&t.values[i]),
                        Space::HDiv => maps[c].contravariant_push(&t.values[i]),
                    };
                    traces[c][d] += trace(v) * f64::from(dofs.cell_signs(c)[i]);
                }
            }
            for d in 0..dofs.num_dofs() {
                jump = jump.max((traces[0][d] - traces[1][d]).norm());
                scale = scale.max(traces[0][d].norm()).max(traces[1][d].norm());
            }
        }
        if scale > 0.0 {
            out.max_jump = out.max_jump.max(jump / scale);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PiolaOutcome {
    pub maps: usize,
    pub circulation: f64,
    pub flux: f64,
    pub curl: f64,
    pub div: f64,
    pub gradient: f64,
}

impl PiolaOutcome {
    pub fn worst(&self) -> f64 {
        [self.circulation, self.flux, self.curl, self.div, self.gradient].into_iter().fold(0.0, f64::max)
    }
}

fn random_map<R: Rng>(dim: usize, rng: &mut R) -> AffineMap {
    loop {
        let mut j = Matrix3::identity();
        let mut o = Point::zeros();
        for r in 0..dim {
            o[r] = rng.gen_range(-2.0..2.0);
            for c in 0..dim {
                j[(r, c)] = rng.gen_range(-1.5..1.5);
            }
        }
        if let Ok(m) = AffineMap::new(dim, o, j) {
            if m.det().abs() > 0.1 {
                return m;
            }
        }
    }
}

/// Circulation along edges, flux through facets, and the commuting
/// relations of gradient, curl and divergence with the pushed fields (by
/// central differences), over `maps` random affine maps alternating 2D/3D.
pub fn piola_identities(seed: u64, maps: usize) -> Result<PiolaOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PiolaOutcome { maps, ..Default::default() };
    let line = quadrature::line_rule(8)?;
    let fd = 1e-3;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    for k in 0..maps {
        let dim = 2 + k % 2;
        let s = ReferenceSimplex::from_dim(dim)?;
        let map = random_map(dim, &mut rng);
        let hcurl = VectorElement::new(VectorFamily::N2, 2, s, ScalarFamily::Bernstein)?;
        let hdiv = VectorElement::new(VectorFamily::Bdm, 2, s, ScalarFamily::Bernstein)?;
        let scalar = ScalarBasis::new(ScalarFamily::Lagrange, 3, s)?;
        let covariant = |x: &Point| -> Vec<Vector3<f64>> {
            hcurl.tabulate(&map.pull_point(x)).values.iter().map(|v| map.covariant_push(v)).collect()
        };
        let contravariant = |x: &Point| -> Vec<Vector3<f64>> {
            hdiv.tabulate(&map.pull_point(x)).values.iter().map(|v| map.contravariant_push(v)).collect()
        };

        for e in s.edges() {
            let (a, b) = (s.vertex(e.vertices()[0]), s.vertex(e.vertices()[1]));
            let (xa, xb) = (map.map_point(&a), map.map_point(&b));
            let mut reference = vec![0.0; hcurl.len()];
            let mut physical = vec![0.0; hcurl.len()];
            for (t, w) in line.points.iter().zip(&line.weights) {
                let xi = a + (b - a) * t[0];
                let x = xa + (xb - xa) * t[0];
                let rv = hcurl.tabulate(&xi).values;
                let pv = covariant(&x);
                for i in 0..hcurl.len() {
                    reference[i] += w * rv[i].dot(&(b - a));
                    physical[i] += w * pv[i].dot(&(xb - xa));
                }
            }
            for i in 0..hcurl.len() {
                out.circulation = out.circulation.max(rel(physical[i], reference[i]));
            }
        }

        let facet_rule = quadrature::rule(dim - 1, 8)?;
        for f in s.facets() {
            let rv: Vec<Point> = f.vertices().iter().map(|&i| s.vertex(i)).collect();
            let pv: Vec<Point> = rv.iter().map(|v| map.map_point(v)).collect();
            let area = |v: &[Point]| -> Vector3<f64> {
                if dim == 2 {
                    let t = v[1] - v[0];
                    Vector3::new(t.y, -t.x, 0.0)
                } else {
                    (v[1] - v[0]).cross(&(v[2] - v[0]))
                }
            };
            let (nr, np) = (area(&rv), area(&pv));
            let mut reference = vec![0.0; hdiv.len()];
            let mut physical = vec![0.0; hdiv.len()];
            for (t, w) in facet_rule.points.iter().zip(&facet_rule.weights) {
                let at = |v: &[Point]| -> Point {
                    let mut p = v[0];
                    for c in 0..dim - 1 {
                        p += (v[c + 1] - v[0]) * t[c];
                    }
                    p
                };
                let a = hdiv.tabulate(&at(&rv)).values;
                let b = contravariant(&at(&pv));
                for i in 0..hdiv.len() {
                    reference[i] += w * a[i].dot(&nr);
                    physical[i] += w * b[i].dot(&np);
                }
            }
            for i in 0..hdiv.len() {
                out.flux = out.flux.max(rel(physical[i], reference[i]));
            }
        }

        for _ in 0..3 {
            let xi = s.random_point(&mut rng);
            let x = map.map_point(&xi);
            let step = |c: usize| {
                let mut e = Point::zeros();
                e[c] = fd;
                e
            };
            // Fourth-order central differences, exact up to rounding for
            // the quartic fields used here.
            let partial = |f: &dyn Fn(&Point) -> Vec<Vector3<f64>>, c: usize| -> Vec<Vector3<f64>> {
                let e = step(c);
                let (p1, m1, p2, m2) = (f(&(x + e)), f(&(x - e)), f(&(x + 2.0 * e)), f(&(x - 2.0 * e)));
                (0..p1.len()).map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * fd)).collect()
            };
            let dcov: Vec<Vec<Vector3<f64>>> = (0..dim).map(|c| partial(&covariant, c)).collect();
            let dcon: Vec<Vec<Vector3<f64>>> = (0..dim).map(|c| partial(&contravariant, c)).collect();
            let tc = hcurl.tabulate(&xi);
            for i in 0..hcurl.len() {
                let expected = map.push_curl(&tc.curl(i));
                let got = if dim == 2 {
                    Vector3::new(0.0, 0.0, dcov[0][i].y - dcov[1][i].x)
                } else {
                    Vector3::new(
                        dcov[1][i].z - dcov[2][i].y,
                        dcov[2][i].x - dcov[0][i].z,
                        dcov[0][i].y - dcov[1][i].x,
                    )
                };
                out.curl = out.curl.max((got - expected).norm() / expected.norm().max(1.0));
            }
            let td = hdiv.tabulate(&xi);
            for i in 0..hdiv.len() {
                let got: f64 = (0..dim).map(|c| dcon[c][i][c]).sum();
                out.div = out.div.max(rel(got, map.push_div(td.div(i))));
            }
            let ts = scalar.tabulate(&xi, false);
            let value = |y: &Point| -> Vec<Vector3<f64>> {
                scalar.tabulate(&map.pull_point(y), false).values.iter().map(|&v| Vector3::new(v, 0.0, 0.0)).collect()
            };
            let dval: Vec<Vec<Vector3<f64>>> = (0..dim).map(|c| partial(&value, c)).collect();
            for i in 0..scalar.len() {
                let expected = map.push_gradient(&ts.gradients[i]);
                let mut got = Vector3::zeros();
                for c in 0..dim {
                    got[c] = dval[c][i].x;
                }
                out.gradient = out.gradient.max((got - expected).norm() / expected.norm().max(1.0));
            }
        }
    }
    Ok(out)
}
