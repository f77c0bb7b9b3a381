//! Polytopal template sets as exact rational data.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use num_rational::Ratio;

use crate::error::{FemError, Result};
use crate::reference::{Point, PolytopeId, ReferenceSimplex};

pub type Q = Ratio<i64>;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Vector element families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VectorFamily {
    /// Nedelec, first type.
    N1,
    /// Nedelec, second type.
    N2,
    Bdm,
    Rt,
}

/// Sobolev space an element family conforms to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    HCurl,
    HDiv,
}

impl VectorFamily {
    pub const ALL: [VectorFamily; 4] = [Self::N1, Self::N2, Self::Bdm, Self::Rt];

    pub fn space(&self) -> Space {
        match self {
            Self::N1 | Self::N2 => Space::HCurl,
            Self::Bdm | Self::Rt => Space::HDiv,
        }
    }

    /// Lowest order accepted by the element builder.
    pub fn min_order(&self) -> usize {
        match self {
            Self::N1 | Self::Rt => 0,
            Self::N2 | Self::Bdm => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::N1 => "n1",
            Self::N2 => "n2",
            Self::Bdm => "bdm",
            Self::Rt => "rt",
        }
    }
}

impl fmt::Display for VectorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VectorFamily {
    type Err = FemError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n1" => Ok(Self::N1),
            "n2" => Ok(Self::N2),
            "bdm" => Ok(Self::Bdm),
            "rt" => Ok(Self::Rt),
            other => Err(FemError::Domain(format!("unknown element family `{other}`"))),
        }
    }
}

/// Affine vector field `x -> A x + b` with rational coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TemplateField {
    pub a: [[Q; 3]; 3],
    pub b: [Q; 3],
}

impl TemplateField {
    pub fn zero() -> Self {
        Self { a: [[q(0); 3]; 3], b: [q(0); 3] }
    }

    pub fn constant(b: [Q; 3]) -> Self {
        Self { b, ..Self::zero() }
    }

    /// Constant field with integer components.
    pub fn int(x: i64, y: i64, z: i64) -> Self {
        Self::constant([q(x), q(y), q(z)])
    }

    pub fn is_constant(&self) -> bool {
        self.a.iter().flatten().all(|x| *x == q(0))
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &[Q; 3]) -> [Q; 3] {
        let mut out = self.b;
        for (i, o) in out.iter_mut().enumerate() {
            for j in 0..3 {
                *o += self.a[i][j] * x[j];
            }
        }
        out
    }

    pub fn linear_part(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| to_f64(self.a[i][j]))
    }

    pub fn constant_part(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| to_f64(self.b[i]))
    }

    pub fn eval(&self, x: &Point) -> Vector3<f64> {
        self.linear_part() * x + self.constant_part()
    }

    /// Curl of the field (constant).  In 2D the rotation sits in the third component.
    pub fn curl(&self) -> Vector3<f64> {
        let a = self.linear_part();
        Vector3::new(a[(2, 1)] - a[(1, 2)], a[(0, 2)] - a[(2, 0)], a[(1, 0)] - a[(0, 1)])
    }

    pub fn div(&self) -> f64 {
        self.linear_part().trace()
    }

    /// Lowest-order Whitney field `l_i grad l_j - l_j grad l_i` on the edge `(i, j)`.
    pub fn whitney(simplex: ReferenceSimplex, i: usize, j: usize) -> Self {
        let g = simplex.barycentric_gradients_exact();
        let c = |k: usize| if k == 0 { 1 } else { 0 };
        let mut f = Self::zero();
        for r in 0..3 {
            for s in 0..3 {
                f.a[r][s] = q(g[j][r] * g[i][s] - g[i][r] * g[j][s]);
            }
            f.b[r] = q(c(i) * g[j][r] - c(j) * g[i][r]);
        }
        f
    }

    /// The field rotated by `R`, i.e. `(v2, -v1)`.
    pub fn rotated(&self) -> Self {
        let mut f = Self::zero();
        f.a[0] = self.a[1];
        f.a[1] = self.a[0].map(|x| -x);
        f.b[0] = self.b[1];
        f.b[1] = -self.b[0];
        f
    }
}

impl Add for TemplateField {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.a[i][j] += rhs.a[i][j];
            }
            self.b[i] += rhs.b[i];
        }
        self
    }
}

impl Neg for TemplateField {
    type Output = Self;
    fn neg(self) -> Self {
        self * q(-1)
    }
}

impl Sub for TemplateField {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul<Q> for TemplateField {
    type Output = Self;
    fn mul(mut self, s: Q) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.a[i][j] *= s;
            }
            self.b[i] *= s;
        }
        self
    }
}

fn fmt_q(x: Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

const COORD: [&str; 3] = ["ξ", "η", "ζ"];

impl fmt::Display for TemplateField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let used = if self.a.iter().any(|r| r[2] != q(0)) || self.b[2] != q(0) || self.a[2].iter().any(|x| *x != q(0)) {
            3
        } else {
            2
        };
        let mut parts = Vec::new();
        for i in 0..used {
            let mut s = String::new();
            if self.b[i] != q(0) {
                s.push_str(&fmt_q(self.b[i]));
            }
            for j in 0..3 {
                let c = self.a[i][j];
                if c == q(0) {
                    continue;
                }
                let mag = if c < q(0) { -c } else { c };
                let sign = if c < q(0) { "-" } else { "+" };
                let coef = if mag == q(1) { String::new() } else { fmt_q(mag) };
                if s.is_empty() {
                    if sign == "-" {
                        s.push('-');
                    }
                } else {
                    s.push_str(&format!(" {sign} "));
                }
                s.push_str(&format!("{coef}{}", COORD[j]));
            }
            if s.is_empty() {
                s.push('0');
            }
            parts.push(s);
        }
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for TemplateField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Template vectors attached to every polytope of a reference simplex.
#[derive(Clone, Debug)]
pub struct TemplateSet {
    pub family: VectorFamily,
    pub simplex: ReferenceSimplex,
    entries: Vec<(PolytopeId, Vec<TemplateField>)>,
}

impl TemplateSet {
    pub fn get(&self, p: &PolytopeId) -> &[TemplateField] {
        self.entries
            .iter()
            .find(|(id, _)| id == p)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn entries(&self) -> &[(PolytopeId, Vec<TemplateField>)] {
        &self.entries
    }
}

fn not_covered(family: VectorFamily, simplex: ReferenceSimplex) -> FemError {
    FemError::NotCovered { family: family.name().to_uppercase(), shape: simplex.name().into() }
}

pub(crate) fn v(x: i64, y: i64, z: i64) -> TemplateField {
    TemplateField::int(x, y, z)
}

fn half() -> Q {
    Q::new(1, 2)
}

/// The published template sets.
///
/// For N1 and RT these are the sets orthogonal to the kernel; the kernel part
/// of those elements is built from [`lowest_order_fields`] and gradients of
/// scalar functions.
pub fn template_set(family: VectorFamily, simplex: ReferenceSimplex) -> Result<TemplateSet> {
    use ReferenceSimplex::*;
    use VectorFamily::*;
    let (e1, e2, e3) = (v(1, 0, 0), v(0, 1, 0), v(0, 0, 1));
    let sets: Vec<Vec<TemplateField>> = match (family, simplex) {
        (N2, Triangle) => vec![
            vec![e1, e2],
            vec![e1 + e2, e1],
            vec![e1 + e2, -e2],
            vec![e2, -e1],
            vec![e1, e2],
            vec![(e1 - e2) * half(), e1 + e2],
            vec![e1, e2],
        ],
        (Bdm, Triangle) => vec![
            vec![e1, -e2],
            vec![e1 - e2, -e2],
            vec![e1 - e2, -e1],
            vec![e1, e2],
            vec![-e2, e1],
            vec![-(e1 + e2) * half(), e2 - e1],
            vec![e1, e2],
        ],
        (N1, Triangle) => {
            let t = lowest_order_fields(N1, Triangle)?;
            let (t1, t2, t3) = (t[0], t[1], t[2]);
            vec![
                vec![t3],
                vec![t2],
                vec![],
                vec![t3 - t2],
                vec![t1 + t3],
                vec![t1 - t2],
                vec![t1 - t2 + t3],
            ]
        }
        (Rt, Triangle) => {
            let f = lowest_order_fields(Rt, Triangle)?;
            let (f1, f2, f3) = (f[0], f[1], f[2]);
            vec![
                vec![-f3],
                vec![f2],
                vec![],
                vec![f2 - f3],
                vec![-f1 - f3],
                vec![f2 - f1],
                vec![f2 - f1 - f3],
            ]
        }
        (N2, Tetrahedron) => {
            let s = e1 + e2 + e3;
            vec![
                vec![e3, e2, e1],
                vec![s, e2, e1],
                vec![s, -e3, e1],
                vec![s, -e3, -e2],
                vec![e3, -e2, -e1],
                vec![e2, e3, -e1],
                vec![e1, e3, e2],
                vec![e2, s, -e1],
                vec![e1, s, e2],
                vec![e1, s, -e3],
                vec![e3, e2, -e1],
                vec![e3, e1, e2],
                vec![e2, e1, -e3],
                vec![e2, e1, s],
                vec![e3, e2, e1],
            ]
        }
        (Bdm, Tetrahedron) => vec![
            vec![-e1, e2, -e3],
            vec![e3 - e1, e2 - e3, -e3],
            vec![e2 - e1, e2 - e3, -e2],
            vec![e2 - e1, e1 - e3, -e1],
            vec![-e1, e2, e3],
            vec![-e1, -e3, e2],
            vec![e2, -e3, e1],
            vec![e3 - e1, -e3, e2 - e3],
            vec![e2 - e3, -e3, e1 - e3],
            vec![e2 - e3, -e2, e1 - e2],
            vec![-e1, e3, e2],
            vec![e2, e3, e1],
            vec![-e3, e2, e1],
            vec![-e3, e2 - e3, e1 - e3],
            vec![e3, e2, e1],
        ],
        (N1 | Rt, Tetrahedron) => return Err(not_covered(family, simplex)),
    };
    let entries = simplex.polytopes().into_iter().zip(sets).collect();
    Ok(TemplateSet { family, simplex, entries })
}

/// Lowest-order edge fields, one per edge in reference order.
///
/// N1 on both simplices (Whitney fields); RT on the triangle only.
pub fn lowest_order_fields(family: VectorFamily, simplex: ReferenceSimplex) -> Result<Vec<TemplateField>> {
    use ReferenceSimplex::*;
    use VectorFamily::*;
    match (family, simplex) {
        (N1, Triangle) => {
            let (xi, eta) = (0, 1);
            let mut t1 = TemplateField::zero();
            t1.a[0][eta] = q(1);
            t1.a[1][xi] = q(-1);
            t1.b[1] = q(1);
            let mut t2 = TemplateField::zero();
            t2.a[0][eta] = q(-1);
            t2.b[0] = q(1);
            t2.a[1][xi] = q(1);
            let mut t3 = TemplateField::zero();
            t3.a[0][eta] = q(1);
            t3.a[1][xi] = q(-1);
            Ok(vec![t1, t2, t3])
        }
        (Rt, Triangle) => {
            let mut f1 = TemplateField::zero();
            f1.b[0] = q(1);
            f1.a[0][0] = q(-1);
            f1.a[1][1] = q(-1);
            let mut f2 = TemplateField::zero();
            f2.a[0][0] = q(1);
            f2.a[1][1] = q(1);
            f2.b[1] = q(-1);
            let mut f3 = TemplateField::zero();
            f3.a[0][0] = q(-1);
            f3.a[1][1] = q(-1);
            Ok(vec![f1, f2, f3])
        }
        (N1, Tetrahedron) => Ok(simplex
            .edges()
            .iter()
            .map(|e| TemplateField::whitney(simplex, e.vertices()[0], e.vertices()[1]))
            .collect()),
        _ => Err(not_covered(family, simplex)),
    }
}

/// Exact coordinates of a reference vertex.
pub(crate) fn vertex_q(simplex: ReferenceSimplex, i: usize) -> [Q; 3] {
    simplex.vertex_exact(i).map(q)
}

pub(crate) fn dot_q(a: &[Q; 3], b: &[i64; 3]) -> Q {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross_q(a: &[Q; 3], b: &[i64; 3]) -> [Q; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
