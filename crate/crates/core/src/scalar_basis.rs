//! Order-p H1-conforming scalar bases on the reference simplices.
//!
//! Every function is indexed by a barycentric multi-index `alpha` with
//! `|alpha| = p`; its support polytope (the vertices with `alpha_i > 0`) is
//! the polytope it is associated with.  Functions are grouped by polytope in
//! reference order and, inside a polytope, sorted by descending
//! lexicographic multi-index.  Along an edge this walks from the lower local
//! vertex to the higher one.

use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::error::{domain, Result};
use crate::reference::{Point, PolytopeId, PolytopeKind, ReferenceSimplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarFamily {
    Lagrange,
    Bernstein,
}

impl ScalarFamily {
    pub fn letter(&self) -> char {
        match self {
            Self::Lagrange => 'L',
            Self::Bernstein => 'B',
        }
    }
}

impl fmt::Display for ScalarFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lagrange => "lagrange",
            Self::Bernstein => "bernstein",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScalarFunction {
    pub alpha: [usize; 4],
    pub polytope: PolytopeId,
}

#[derive(Clone, Debug)]
pub struct ScalarBasis {
    family: ScalarFamily,
    order: usize,
    simplex: ReferenceSimplex,
    functions: Vec<ScalarFunction>,
    /// `factors[a]` holds the coefficients (ascending powers) of the
    /// univariate factor applied to a barycentric coordinate with exponent `a`.
    factors: Vec<Vec<f64>>,
    scale: f64,
}

/// Values, gradients and Hessians of every basis function at one point.
#[derive(Clone, Debug, Default)]
pub struct ScalarTabulation {
    pub values: Vec<f64>,
    pub gradients: Vec<Vector3<f64>>,
    pub hessians: Vec<Matrix3<f64>>,
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Value, first and second derivative of a polynomial.
fn poly_eval(c: &[f64], x: f64) -> [f64; 3] {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &ci in c.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + v;
        v = v * x + ci;
    }
    [v, d1, d2]
}

/// All multi-indices of length `n` summing to `p`, in descending lexicographic order.
pub fn multi_indices(n: usize, p: usize) -> Vec<[usize; 4]> {
    fn rec(n: usize, left: usize, cur: &mut [usize; 4], pos: usize, out: &mut Vec<[usize; 4]>) {
        if pos == n - 1 {
            cur[pos] = left;
            out.push(*cur);
            return;
        }
        for a in (0..=left).rev() {
            cur[pos] = a;
            rec(n, left - a, cur, pos + 1, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    rec(n, p, &mut [0; 4], 0, &mut out);
    out
}

fn support(simplex: ReferenceSimplex, alpha: &[usize; 4]) -> PolytopeId {
    let verts: Vec<usize> = (0..simplex.num_vertices()).filter(|&i| alpha[i] > 0).collect();
    let kind = if verts.len() == simplex.num_vertices() {
        PolytopeKind::Cell
    } else {
        match verts.len() {
            1 => PolytopeKind::Vertex,
            2 => PolytopeKind::Edge,
            _ => PolytopeKind::Face,
        }
    };
    PolytopeId::new(kind, &verts).expect("support of a multi-index is sorted")
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl ScalarBasis {
    pub fn new(family: ScalarFamily, order: usize, simplex: ReferenceSimplex) -> Result<Self> {
        if order < 1 {
            return domain(format!("scalar basis order must be at least 1, got {order}"));
        }
        let n = simplex.num_vertices();
        let all = multi_indices(n, order);
        let mut functions = Vec::with_capacity(all.len());
        for poly in simplex.polytopes() {
            for alpha in &all {
                if support(simplex, alpha) == poly {
                    functions.push(ScalarFunction { alpha: *alpha, polytope: poly });
                }
            }
        }
        let p = order as f64;
        let factors = (0..=order)
            .map(|a| match family {
                ScalarFamily::Lagrange => (0..a).fold(vec![1.0], |acc, k| {
                    let k = k as f64;
                    poly_mul(&acc, &[-k / (k + 1.0), p / (k + 1.0)])
                }),
                ScalarFamily::Bernstein => {
                    let mut c = vec![0.0; a + 1];
                    c[a] = 1.0 / factorial(a);
                    c
                }
            })
            .collect();
        let scale = match family {
            ScalarFamily::Lagrange => 1.0,
            ScalarFamily::Bernstein => factorial(order),
        };
        Ok(Self { family, order, simplex, functions, factors, scale })
    }

    pub fn family(&self) -> ScalarFamily {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn simplex(&self) -> ReferenceSimplex {
        self.simplex
    }

    pub fn functions(&self) -> &[ScalarFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Indices of the functions associated with `p`, in basis order.
    pub fn indices_on(&self, p: &PolytopeId) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.functions[i].polytope == *p).collect()
    }

    /// Principal-lattice point of each function (the Lagrange node).
    pub fn nodes(&self) -> Vec<Point> {
        let p = self.order as f64;
        self.functions
            .iter()
            .map(|f| {
                let l: Vec<f64> = f.alpha[..self.simplex.num_vertices()]
                    .iter()
                    .map(|&a| a as f64 / p)
                    .collect();
                self.simplex.point_of(&l)
            })
            .collect()
    }

    fn check(&self, x: &Point) -> Result<()> {
        if self.simplex.contains(x) {
            Ok(())
        } else {
            domain(format!("point {:?} lies outside the reference {}", x.as_slice(), self.simplex.name()))
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(self.tabulate(x, false).values)
    }

    pub fn gradient(&self, x: &Point) -> Result<Vec<Vector3<f64>>> {
        self.check(x)?;
        Ok(self.tabulate(x, false).gradients)
    }

    pub fn hessian(&self, x: &Point) -> Result<Vec<Matrix3<f64>>> {
        self.check(x)?;
        Ok(self.tabulate(x, true).hessians)
    }

    /// Values and gradients (and Hessians if asked) without the membership check.
    pub fn tabulate(&self, x: &Point, with_hessians: bool) -> ScalarTabulation {
        let n = self.simplex.num_vertices();
        let lambda = self.simplex.barycentric(x);
        let grads = self.simplex.barycentric_gradients();
        // table[i][a] = (q_a, q_a', q_a'') at lambda_i
        let table: Vec<Vec<[f64; 3]>> = (0..n)
            .map(|i| self.factors.iter().map(|c| poly_eval(c, lambda[i])).collect())
            .collect();
        let mut out = ScalarTabulation {
            values: Vec::with_capacity(self.len()),
            gradients: Vec::with_capacity(self.len()),
            hessians: Vec::new(),
        };
        for f in &self.functions {
            let q: Vec<[f64; 3]> = (0..n).map(|i| table[i][f.alpha[i]]).collect();
            let prod_except = |skip: &[usize]| -> f64 {
                (0..n).filter(|k| !skip.contains(k)).map(|k| q[k][0]).product::<f64>()
            };
            out.values.push(self.scale * prod_except(&[]));
            let mut g = Vector3::zeros();
            for i in 0..n {
                g += grads[i] * (q[i][1] * prod_except(&[i]));
            }
            out.gradients.push(g * self.scale);
            if with_hessians {
                let mut h = Matrix3::zeros();
                for i in 0..n {
                    h += grads[i] * grads[i].transpose() * (q[i][2] * prod_except(&[i]));
                    for j in 0..n {
                        if j != i {
                            h += grads[i] * grads[j].transpose() * (q[i][1] * q[j][1] * prod_except(&[i, j]));
                        }
                    }
                }
                out.hessians.push(h * self.scale);
            }
        }
        out
    }
}

/// Number of order-p scalar functions on the simplex.
pub fn scalar_dimension(simplex: ReferenceSimplex, p: usize) -> usize {
    match simplex {
        ReferenceSimplex::Triangle => (p + 2) * (p + 1) / 2,
        ReferenceSimplex::Tetrahedron => (p + 3) * (p + 2) * (p + 1) / 6,
    }
}
