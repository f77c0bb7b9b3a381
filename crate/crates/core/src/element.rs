//! Reference vector elements: scalar polytopal functions tensored with
//! template sets, plus the kernel part of the first-type families.

use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::error::{domain, FemError, Result};
use crate::reference::{Point, PolytopeId, PolytopeKind, ReferenceSimplex};
use crate::scalar_basis::{ScalarBasis, ScalarFamily};
use crate::templates::{
    cross_q, dot_q, lowest_order_fields, template_set, vertex_q, Space, TemplateField, VectorFamily, Q,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    VertexEdge,
    VertexFace,
    Edge,
    EdgeFace,
    Face,
    EdgeCell,
    FaceCell,
    Cell,
    VertexCell,
    Gradient,
    CurlOfScalar,
    LowestOrder,
}

impl FunctionKind {
    fn from_pair(source: PolytopeKind, target: PolytopeKind) -> Self {
        use PolytopeKind::*;
        match (source, target) {
            (Vertex, Edge) => Self::VertexEdge,
            (Vertex, Face) => Self::VertexFace,
            (Vertex, Cell) => Self::VertexCell,
            (Edge, Edge) => Self::Edge,
            (Edge, Face) => Self::EdgeFace,
            (Edge, Cell) => Self::EdgeCell,
            (Face, Face) => Self::Face,
            (Face, Cell) => Self::FaceCell,
            (Cell, Cell) => Self::Cell,
            (s, t) => unreachable!("association {t:?} from source {s:?}"),
        }
    }

    pub fn is_kernel(&self) -> bool {
        matches!(self, Self::Gradient | Self::CurlOfScalar)
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::VertexEdge => "vertex-edge",
            Self::VertexFace => "vertex-face",
            Self::Edge => "edge",
            Self::EdgeFace => "edge-face",
            Self::Face => "face",
            Self::EdgeCell => "edge-cell",
            Self::FaceCell => "face-cell",
            Self::Cell => "cell",
            Self::VertexCell => "vertex-cell",
            Self::Gradient => "gradient",
            Self::CurlOfScalar => "curl-of-scalar",
            Self::LowestOrder => "lowest-order",
        };
        f.write_str(s)
    }
}

/// How a basis function is evaluated.
#[derive(Clone, Debug)]
pub enum Rule {
    /// Scalar function `scalar` of the order-p basis times an affine template.
    Product { scalar: usize, field: TemplateField },
    /// A lowest-order field on its own.
    Field(TemplateField),
    /// Gradient of function `scalar` of the order-(p+1) kernel basis.
    Gradient { scalar: usize },
    /// `R` applied to that gradient.
    RotatedGradient { scalar: usize },
}

#[derive(Clone, Debug)]
pub struct VectorBasisFunction {
    pub kind: FunctionKind,
    /// Polytope whose global degree of freedom this function becomes.
    pub association: PolytopeId,
    /// Polytope of the scalar factor (or of the lowest-order field).
    pub source: PolytopeId,
    pub scalar: Option<usize>,
    pub template: Option<usize>,
    pub rule: Rule,
    affine: Option<(Matrix3<f64>, Vector3<f64>)>,
}

/// Values and first derivatives of every function at one reference point.
#[derive(Clone, Debug, Default)]
pub struct ElementTabulation {
    pub values: Vec<Vector3<f64>>,
    /// `jacobians[i][(r, c)] = d v_r / d x_c`.
    pub jacobians: Vec<Matrix3<f64>>,
}

impl ElementTabulation {
    pub fn curl(&self, i: usize) -> Vector3<f64> {
        axial(&self.jacobians[i])
    }

    pub fn div(&self, i: usize) -> f64 {
        self.jacobians[i].trace()
    }
}

fn axial(d: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(d[(2, 1)] - d[(1, 2)], d[(0, 2)] - d[(2, 0)], d[(1, 0)] - d[(0, 1)])
}

#[derive(Clone, Debug)]
pub struct VectorElement {
    family: VectorFamily,
    order: usize,
    simplex: ReferenceSimplex,
    scalar_family: ScalarFamily,
    functions: Vec<VectorBasisFunction>,
    scalar: Option<ScalarBasis>,
    kernel: Option<ScalarBasis>,
}

/// Expected dimension of an element space.
pub fn element_dimension(family: VectorFamily, p: usize, simplex: ReferenceSimplex) -> Option<usize> {
    use ReferenceSimplex::*;
    use VectorFamily::*;
    match (family, simplex) {
        (N2 | Bdm, Triangle) if p >= 1 => Some((p + 2) * (p + 1)),
        (N1 | Rt, Triangle) => Some((p + 3) * (p + 1)),
        (N2 | Bdm, Tetrahedron) if p >= 1 => Some((p + 3) * (p + 2) * (p + 1) / 2),
        (N1, Tetrahedron) if p == 0 => Some(6),
        _ => None,
    }
}

/// Exact test: does the trace of `field` on polytope `q` vanish identically?
fn trace_vanishes(simplex: ReferenceSimplex, space: Space, q: &PolytopeId, field: &TemplateField) -> bool {
    let zero = Q::from_integer(0);
    q.vertices().iter().all(|&vi| {
        let val = field.eval_exact(&vertex_q(simplex, vi));
        match (space, q.kind()) {
            (Space::HCurl, PolytopeKind::Edge) => dot_q(&val, &simplex.edge_tangent_exact(q).unwrap()) == zero,
            (Space::HCurl, PolytopeKind::Face) => cross_q(&val, &simplex.oriented_normal_exact(q).unwrap())
                .iter()
                .all(|c| *c == zero),
            (Space::HDiv, _) => dot_q(&val, &simplex.oriented_normal_exact(q).unwrap()) == zero,
            _ => unreachable!(),
        }
    })
}

/// Smallest polytope containing `source` on which the trace of `field` is
/// nonzero; the cell if there is none.
fn associate(
    simplex: ReferenceSimplex,
    space: Space,
    source: &PolytopeId,
    field: &TemplateField,
) -> Result<PolytopeId> {
    let candidates: Vec<PolytopeId> = simplex
        .polytopes()
        .into_iter()
        .filter(|q| q.kind() != PolytopeKind::Cell && q.contains(source))
        .filter(|q| match space {
            Space::HCurl => q.dim() >= 1,
            Space::HDiv => q.dim() + 1 == simplex.dim(),
        })
        .filter(|q| !trace_vanishes(simplex, space, q, field))
        .collect();
    let Some(min_dim) = candidates.iter().map(|q| q.dim()).min() else {
        return Ok(simplex.cell());
    };
    let lowest: Vec<_> = candidates.iter().filter(|q| q.dim() == min_dim).collect();
    if lowest.len() != 1 {
        return domain(format!("template {field} on {source} has nonzero trace on {lowest:?}"));
    }
    Ok(*lowest[0])
}

impl VectorElement {
    pub fn new(family: VectorFamily, order: usize, simplex: ReferenceSimplex, scalar_family: ScalarFamily) -> Result<Self> {
        if order < family.min_order() {
            return domain(format!("{family} needs order at least {}, got {order}", family.min_order()));
        }
        if simplex == ReferenceSimplex::Tetrahedron && matches!(family, VectorFamily::N1 | VectorFamily::Rt) && !(family == VectorFamily::N1 && order == 0) {
            return Err(FemError::NotCovered { family: family.name().to_uppercase(), shape: simplex.name().into() });
        }
        let space = family.space();
        let scalar = if order >= 1 { Some(ScalarBasis::new(scalar_family, order, simplex)?) } else { None };
        let first_type = matches!(family, VectorFamily::N1 | VectorFamily::Rt);
        let kernel = if first_type && order >= 1 {
            Some(ScalarBasis::new(scalar_family, order + 1, simplex)?)
        } else {
            None
        };
        let lowest = if first_type { lowest_order_fields(family, simplex)? } else { Vec::new() };
        let templates = if first_type && simplex == ReferenceSimplex::Tetrahedron {
            None
        } else {
            Some(template_set(family, simplex)?)
        };

        let mut functions = Vec::new();
        let edges = simplex.edges();
        for poly in simplex.polytopes() {
            if let Some(k) = edges.iter().position(|e| *e == poly).filter(|_| first_type) {
                functions.push(VectorBasisFunction {
                    kind: FunctionKind::LowestOrder,
                    association: poly,
                    source: poly,
                    scalar: None,
                    template: Some(k),
                    rule: Rule::Field(lowest[k]),
                    affine: Some((lowest[k].linear_part(), lowest[k].constant_part())),
                });
            }
            if let Some(kb) = &kernel {
                if poly.kind() != PolytopeKind::Vertex {
                    for s in kb.indices_on(&poly) {
                        let (kind, rule) = match space {
                            Space::HCurl => (FunctionKind::Gradient, Rule::Gradient { scalar: s }),
                            Space::HDiv => (FunctionKind::CurlOfScalar, Rule::RotatedGradient { scalar: s }),
                        };
                        functions.push(VectorBasisFunction {
                            kind,
                            association: poly,
                            source: poly,
                            scalar: Some(s),
                            template: None,
                            rule,
                            affine: None,
                        });
                    }
                }
            }
            let (Some(sb), Some(ts)) = (&scalar, &templates) else { continue };
            let set = ts.get(&poly);
            for s in sb.indices_on(&poly) {
                for (t, field) in set.iter().enumerate() {
                    let association = associate(simplex, space, &poly, field)?;
                    functions.push(VectorBasisFunction {
                        kind: FunctionKind::from_pair(poly.kind(), association.kind()),
                        association,
                        source: poly,
                        scalar: Some(s),
                        template: Some(t),
                        rule: Rule::Product { scalar: s, field: *field },
                        affine: Some((field.linear_part(), field.constant_part())),
                    });
                }
            }
        }
        let el = Self { family, order, simplex, scalar_family, functions, scalar, kernel };
        if let Some(d) = element_dimension(family, order, simplex) {
            if d != el.len() {
                return domain(format!("{family}{order} built {} functions, expected {d}", el.len()));
            }
        }
        Ok(el)
    }

    pub fn family(&self) -> VectorFamily {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn simplex(&self) -> ReferenceSimplex {
        self.simplex
    }

    pub fn scalar_family(&self) -> ScalarFamily {
        self.scalar_family
    }

    pub fn space(&self) -> Space {
        self.family.space()
    }

    pub fn functions(&self) -> &[VectorBasisFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Highest total polynomial degree of any component.
    pub fn polynomial_degree(&self) -> usize {
        match self.family {
            VectorFamily::N1 | VectorFamily::Rt => self.order + 1,
            _ => self.order,
        }
    }

    /// Number of functions associated with each polytope, in reference order.
    pub fn counts_by_polytope(&self) -> Vec<(PolytopeId, usize)> {
        self.simplex
            .polytopes()
            .into_iter()
            .map(|p| (p, self.functions.iter().filter(|f| f.association == p).count()))
            .collect()
    }

    /// Adds `delta` to the constant part of the template behind function
    /// `index`.  Only meant for negative-control tests.
    pub fn perturb_template(&mut self, index: usize, delta: Vector3<f64>) -> Result<()> {
        match self.functions.get_mut(index).and_then(|f| f.affine.as_mut()) {
            Some((_, b)) => {
                *b += delta;
                Ok(())
            }
            None => domain(format!("function {index} has no template to perturb")),
        }
    }

    fn check(&self, x: &Point) -> Result<()> {
        if self.simplex.contains(x) {
            Ok(())
        } else {
            domain(format!("point {:?} lies outside the reference {}", x.as_slice(), self.simplex.name()))
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<Vec<Vector3<f64>>> {
        self.check(x)?;
        Ok(self.tabulate(x).values)
    }

    /// Reference curls.  On the triangle the scalar rotation is the third component.
    pub fn curl(&self, x: &Point) -> Result<Vec<Vector3<f64>>> {
        if self.space() != Space::HCurl {
            return domain(format!("curl requested for the H(div) family {}", self.family));
        }
        self.check(x)?;
        let t = self.tabulate(x);
        Ok((0..self.len()).map(|i| t.curl(i)).collect())
    }

    pub fn div(&self, x: &Point) -> Result<Vec<f64>> {
        if self.space() != Space::HDiv {
            return domain(format!("divergence requested for the H(curl) family {}", self.family));
        }
        self.check(x)?;
        let t = self.tabulate(x);
        Ok((0..self.len()).map(|i| t.div(i)).collect())
    }

    /// Values and Jacobians at `x`, without the membership check.
    pub fn tabulate(&self, x: &Point) -> ElementTabulation {
        let st = self.scalar.as_ref().map(|b| b.tabulate(x, false));
        let kt = self.kernel.as_ref().map(|b| b.tabulate(x, true));
        let mut out = ElementTabulation {
            values: Vec::with_capacity(self.len()),
            jacobians: Vec::with_capacity(self.len()),
        };
        let r3 = Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for f in &self.functions {
            let (v, d) = match (&f.rule, &f.affine) {
                (Rule::Product { scalar, .. }, Some((a, b))) => {
                    let st = st.as_ref().expect("scalar basis present");
                    let l = a * x + b;
                    let n = st.values[*scalar];
                    (l * n, l * st.gradients[*scalar].transpose() + a * n)
                }
                (Rule::Field(_), Some((a, b))) => (a * x + b, *a),
                (Rule::Gradient { scalar }, _) => {
                    let kt = kt.as_ref().expect("kernel basis present");
                    (kt.gradients[*scalar], kt.hessians[*scalar])
                }
                (Rule::RotatedGradient { scalar }, _) => {
                    let kt = kt.as_ref().expect("kernel basis present");
                    (r3 * kt.gradients[*scalar], r3 * kt.hessians[*scalar])
                }
                _ => unreachable!("templated rule without affine data"),
            };
            out.values.push(v);
            out.jacobians.push(d);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TRI: ReferenceSimplex = ReferenceSimplex::Triangle;
    const TET: ReferenceSimplex = ReferenceSimplex::Tetrahedron;
    const L: ScalarFamily = ScalarFamily::Lagrange;
    const B: ScalarFamily = ScalarFamily::Bernstein;

    fn kinds(e: &VectorElement) -> Vec<FunctionKind> {
        e.functions().iter().map(|f| f.kind).collect()
    }

    fn count(e: &VectorElement, k: FunctionKind) -> usize {
        kinds(e).iter().filter(|&&x| x == k).count()
    }

    #[test]
    fn n2_linear_triangle() {
        let e = VectorElement::new(VectorFamily::N2, 1, TRI, L).unwrap();
        assert_eq!(e.len(), 6);
        assert!(kinds(&e).iter().all(|k| *k == FunctionKind::VertexEdge));
        let v = e.evaluate(&Point::zeros()).unwrap();
        assert_eq!(v[0], Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(v[1], Vector3::new(0.0, 1.0, 0.0));
        assert!(v[2..].iter().all(|x| x.norm() == 0.0));
        assert_eq!(e.functions()[0].association, PolytopeId::edge(0, 2));
        assert_eq!(e.functions()[1].association, PolytopeId::edge(0, 1));
    }

    #[test]
    fn n1_quadratic_breakdown() {
        let e = VectorElement::new(VectorFamily::N1, 2, TRI, B).unwrap();
        assert_eq!(e.len(), 15);
        assert_eq!(count(&e, FunctionKind::LowestOrder), 3);
        assert_eq!(count(&e, FunctionKind::Gradient), 7);
        assert_eq!(
            e.functions().iter().filter(|f| f.kind == FunctionKind::Gradient && f.association.kind() == PolytopeKind::Edge).count(),
            6
        );
        assert_eq!(count(&e, FunctionKind::VertexCell), 2);
        assert_eq!(count(&e, FunctionKind::EdgeCell), 3);
        assert_eq!(count(&e, FunctionKind::Cell), 0);
    }

    #[test]
    fn bdm_linear_tetrahedron() {
        let e = VectorElement::new(VectorFamily::Bdm, 1, TET, L).unwrap();
        assert_eq!(e.len(), 12);
        assert!(kinds(&e).iter().all(|k| *k == FunctionKind::VertexFace));
    }

    #[test]
    fn tetrahedron_kinds() {
        let e = VectorElement::new(VectorFamily::N2, 4, TET, L).unwrap();
        for k in [FunctionKind::VertexEdge, FunctionKind::Edge, FunctionKind::EdgeFace, FunctionKind::Face, FunctionKind::FaceCell, FunctionKind::Cell] {
            assert!(count(&e, k) > 0, "{k}");
        }
        let e = VectorElement::new(VectorFamily::N2, 3, TET, L).unwrap();
        assert_eq!(count(&e, FunctionKind::VertexEdge), 12);
        assert_eq!(count(&e, FunctionKind::Edge), 12);
        assert_eq!(count(&e, FunctionKind::EdgeFace), 24);
        let e = VectorElement::new(VectorFamily::Bdm, 3, TET, B).unwrap();
        assert_eq!(count(&e, FunctionKind::VertexFace), 12);
        assert_eq!(count(&e, FunctionKind::EdgeFace), 24);
        assert_eq!(count(&e, FunctionKind::EdgeCell), 12);
        assert_eq!(count(&e, FunctionKind::Face), 4);
        assert_eq!(count(&e, FunctionKind::FaceCell), 8);
        assert_eq!(count(&e, FunctionKind::Cell), 0);
    }

    #[test]
    fn lowest_order_examples() {
        let e = VectorElement::new(VectorFamily::N1, 0, TRI, L).unwrap();
        assert_eq!(e.evaluate(&Point::zeros()).unwrap()[0], Vector3::new(0.0, 1.0, 0.0));
        let c = Point::new(1.0 / 3.0, 1.0 / 3.0, 0.0);
        let rot = e.curl(&c).unwrap();
        assert_eq!(rot[0].z, -2.0);
        assert_eq!(rot[2].z, -2.0);
        let r = VectorElement::new(VectorFamily::Rt, 0, TRI, L).unwrap();
        assert_abs_diff_eq!(r.evaluate(&c).unwrap()[2], Vector3::new(-1.0 / 3.0, -1.0 / 3.0, 0.0), epsilon = 1e-15);
        assert_eq!(r.div(&c).unwrap()[0], -2.0);
        assert!(r.curl(&c).is_err());
        assert!(e.div(&c).is_err());
        let w = VectorElement::new(VectorFamily::N1, 0, TET, L).unwrap();
        assert_eq!(w.len(), 6);
        assert!(VectorElement::new(VectorFamily::N1, 1, TET, L).is_err());
        assert!(VectorElement::new(VectorFamily::N2, 0, TRI, L).is_err());
    }

    #[test]
    fn bdm_divergence_example() {
        let e = VectorElement::new(VectorFamily::Bdm, 1, TRI, L).unwrap();
        let f = e
            .functions()
            .iter()
            .position(|f| f.source == PolytopeId::vertex(0) && f.template == Some(1))
            .unwrap();
        for x in [Point::new(0.1, 0.2, 0.0), Point::new(0.5, 0.1, 0.0)] {
            assert_abs_diff_eq!(e.div(&x).unwrap()[f], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        let cases = [
            (VectorFamily::N1, 2, TRI),
            (VectorFamily::Rt, 2, TRI),
            (VectorFamily::N2, 2, TRI),
            (VectorFamily::Bdm, 2, TET),
            (VectorFamily::N2, 2, TET),
            (VectorFamily::N1, 0, TET),
        ];
        for (fam, p, s) in cases {
            let e = VectorElement::new(fam, p, s, B).unwrap();
            for _ in 0..5 {
                let x = s.random_point(&mut rng);
                let t = e.tabulate(&x);
                for c in 0..s.dim() {
                    let mut d = Point::zeros();
                    d[c] = h;
                    let tp = e.tabulate(&(x + d));
                    let tm = e.tabulate(&(x - d));
                    for i in 0..e.len() {
                        let fd = (tp.values[i] - tm.values[i]) / (2.0 * h);
                        assert!((fd - t.jacobians[i].column(c)).norm() < 1e-6, "{fam}{p} fn {i}");
                    }
                }
            }
        }
    }

    #[test]
    fn stacked_evaluation_is_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (fam, s, orders) in [
            (VectorFamily::N2, TRI, 1..=4),
            (VectorFamily::Bdm, TRI, 1..=4),
            (VectorFamily::N1, TRI, 0..=3),
            (VectorFamily::Rt, TRI, 0..=3),
            (VectorFamily::N2, TET, 1..=3),
            (VectorFamily::Bdm, TET, 1..=3),
        ] {
            for p in orders {
                for sf in [L, B] {
                    if p == 2 && sf == L && matches!(fam, VectorFamily::N1 | VectorFamily::Rt) {
                        continue;
                    }
                    let e = VectorElement::new(fam, p, s, sf).unwrap();
                    let d = s.dim();
                    let pts: Vec<Point> = (0..e.len()).map(|_| s.random_point(&mut rng)).collect();
                    let mut m = DMatrix::zeros(d * e.len(), e.len());
                    for (k, x) in pts.iter().enumerate() {
                        let v = e.tabulate(x).values;
                        for (j, vj) in v.iter().enumerate() {
                            for c in 0..d {
                                m[(d * k + c, j)] = vj[c];
                            }
                        }
                    }
                    let sv = m.singular_values();
                    assert!(sv.min() > 1e-8 * sv.max(), "{fam}{p} {sf}");
                }
            }
        }
    }

    /// With equispaced Lagrange scalars of order 2 the non-kernel products
    /// of the first-type families have curls (divergences) that are
    /// dependent on the lowest-order part; the span loses two dimensions.
    #[test]
    fn first_type_order_two_lagrange_is_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for fam in [VectorFamily::N1, VectorFamily::Rt] {
            let e = VectorElement::new(fam, 2, TRI, L).unwrap();
            let pts: Vec<Point> = (0..40).map(|_| TRI.random_point(&mut rng)).collect();
            let m = DMatrix::from_fn(80, e.len(), |r, j| e.tabulate(&pts[r / 2]).values[j][r % 2]);
            let sv = m.singular_values();
            assert_eq!(m.rank(1e-9 * sv.max()), 13);
        }
    }

    #[test]
    fn designated_traces_equal_scalar_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (fam, s) in [(VectorFamily::N2, TRI), (VectorFamily::Bdm, TRI), (VectorFamily::N2, TET), (VectorFamily::Bdm, TET)] {
            let e = VectorElement::new(fam, 3, s, L).unwrap();
            let sb = ScalarBasis::new(L, 3, s).unwrap();
            for (i, f) in e.functions().iter().enumerate() {
                let q = f.association;
                let designated = match fam.space() {
                    Space::HCurl => q.kind() == PolytopeKind::Edge,
                    Space::HDiv => q.dim() + 1 == s.dim(),
                };
                if !designated {
                    continue;
                }
                for _ in 0..10 {
                    let x = s.random_point_on(&q, &mut rng);
                    let val = e.tabulate(&x).values[i];
                    let tr = match fam.space() {
                        Space::HCurl => val.dot(&s.edge_tangent(&q).unwrap()),
                        Space::HDiv => val.dot(&s.oriented_normal(&q).unwrap()),
                    };
                    let n = sb.tabulate(&x, false).values[f.scalar.unwrap()];
                    assert_abs_diff_eq!(tr, n, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn foreign_traces_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (fam, s, p) in [
            (VectorFamily::N2, TRI, 3),
            (VectorFamily::Bdm, TRI, 3),
            (VectorFamily::N1, TRI, 3),
            (VectorFamily::Rt, TRI, 3),
            (VectorFamily::N2, TET, 3),
            (VectorFamily::Bdm, TET, 3),
            (VectorFamily::N1, TET, 0),
        ] {
            let e = VectorElement::new(fam, p, s, B).unwrap();
            let polys: Vec<PolytopeId> = s
                .polytopes()
                .into_iter()
                .filter(|q| match fam.space() {
                    Space::HCurl => q.dim() >= 1 && q.kind() != PolytopeKind::Cell,
                    Space::HDiv => q.dim() + 1 == s.dim(),
                })
                .collect();
            for q in &polys {
                for _ in 0..10 {
                    let x = s.random_point_on(q, &mut rng);
                    let t = e.tabulate(&x);
                    for (f, v) in e.functions().iter().zip(&t.values) {
                        if q.contains(&f.association) {
                            continue;
                        }
                        let tr = match (fam.space(), q.kind()) {
                            (Space::HCurl, PolytopeKind::Edge) => v.dot(&s.edge_tangent(q).unwrap()).abs(),
                            (Space::HCurl, _) => v.cross(&s.oriented_normal(q).unwrap()).norm(),
                            (Space::HDiv, _) => v.dot(&s.oriented_normal(q).unwrap()).abs(),
                        };
                        assert!(tr < 1e-12, "{fam}{p} {} ({}) on {q}: {tr}", f.association, f.kind);
                    }
                }
            }
        }
    }

    #[test]
    fn perturbation_hook() {
        let mut e = VectorElement::new(VectorFamily::N2, 1, TRI, L).unwrap();
        e.perturb_template(0, Vector3::new(1e-3, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(e.evaluate(&Point::zeros()).unwrap()[0].x, 1.001, epsilon = 1e-15);
        let mut k = VectorElement::new(VectorFamily::N1, 1, TRI, L).unwrap();
        let g = k.functions().iter().position(|f| f.kind == FunctionKind::Gradient).unwrap();
        assert!(k.perturb_template(g, Vector3::zeros()).is_err());
    }
}
