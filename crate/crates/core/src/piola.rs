//! Affine cell maps and Piola push-forwards.
//!
//! On triangles the map is embedded in 3D with `J[2][2] = 1`, so the scalar
//! rotation carried in the third component of a curl transforms as
//! `rot / det J` without any special casing.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{domain, Result};
use crate::reference::{Point, ReferenceSimplex};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    dim: usize,
    origin: Point,
    jacobian: Matrix3<f64>,
    det: f64,
    inv_t: Matrix3<f64>,
}

impl AffineMap {
    /// `x(xi) = origin + J xi`.  For `dim == 2` only the upper 2x2 block of
    /// `jacobian` is used.
    pub fn new(dim: usize, origin: Point, jacobian: Matrix3<f64>) -> Result<Self> {
        let mut j = jacobian;
        if dim == 2 {
            j[(0, 2)] = 0.0;
            j[(1, 2)] = 0.0;
            j[(2, 0)] = 0.0;
            j[(2, 1)] = 0.0;
            j[(2, 2)] = 1.0;
        } else if dim != 3 {
            return domain(format!("affine maps exist in 2D and 3D, not {dim}D"));
        }
        let det = j.determinant();
        let scale = j.norm().powi(dim as i32);
        if !det.is_finite() || det.abs() <= 1e-14 * scale {
            return domain(format!("degenerate affine map (det J = {det:e})"));
        }
        let inv_t = j.try_inverse().expect("nonzero determinant").transpose();
        Ok(Self { dim, origin, jacobian: j, det, inv_t })
    }

    pub fn from_matrix2(origin: Vector2<f64>, j: Matrix2<f64>) -> Result<Self> {
        let mut m = Matrix3::identity();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&j);
        Self::new(2, Point::new(origin.x, origin.y, 0.0), m)
    }

    /// Map sending the reference vertices to `x` in order.
    pub fn from_vertices(simplex: ReferenceSimplex, x: &[Point]) -> Result<Self> {
        let n = simplex.num_vertices();
        if x.len() != n {
            return domain(format!("{} vertices given for a {}", x.len(), simplex.name()));
        }
        let mut j = Matrix3::identity();
        for c in 0..simplex.dim() {
            let k = (0..n)
                .find(|&k| {
                    let v = simplex.vertex(k);
                    (0..3).all(|r| v[r] == if r == c { 1.0 } else { 0.0 })
                })
                .expect("unit vertex");
            j.set_column(c, &(x[k] - x[0]));
        }
        Self::new(simplex.dim(), x[0], j)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn jacobian(&self) -> &Matrix3<f64> {
        &self.jacobian
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn inverse_transpose(&self) -> &Matrix3<f64> {
        &self.inv_t
    }

    /// `det(J) J^{-T}`, the map taking reference area vectors to physical ones.
    pub fn cofactor(&self) -> Matrix3<f64> {
        self.inv_t * self.det
    }

    pub fn map_point(&self, xi: &Point) -> Point {
        self.origin + self.jacobian * xi
    }

    pub fn pull_point(&self, x: &Point) -> Point {
        self.inv_t.transpose() * (x - self.origin)
    }

    /// Preserves tangential components: `J^{-T} v`.
    pub fn covariant_push(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.inv_t * v
    }

    /// Preserves normal fluxes: `J v / det J`.
    pub fn contravariant_push(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.jacobian * v / self.det
    }

    pub fn push_curl(&self, c: &Vector3<f64>) -> Vector3<f64> {
        self.contravariant_push(c)
    }

    pub fn push_div(&self, d: f64) -> f64 {
        d / self.det
    }

    pub fn push_gradient(&self, g: &Vector3<f64>) -> Vector3<f64> {
        self.inv_t * g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::VectorElement;
    use crate::scalar_basis::{ScalarBasis, ScalarFamily};
    use crate::templates::VectorFamily;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn map2(j: [f64; 4]) -> AffineMap {
        AffineMap::from_matrix2(Vector2::zeros(), Matrix2::new(j[0], j[1], j[2], j[3])).unwrap()
    }

    fn v2(x: f64, y: f64) -> Vector3<f64> {
        Vector3::new(x, y, 0.0)
    }

    #[test]
    fn covariant_examples() {
        assert_eq!(map2([1.0, 0.0, 0.0, 1.0]).covariant_push(&v2(0.3, -0.2)), v2(0.3, -0.2));
        assert_eq!(map2([2.0, 0.0, 0.0, 1.0]).covariant_push(&v2(1.0, 0.0)), v2(0.5, 0.0));
        assert_abs_diff_eq!(map2([0.0, -1.0, 1.0, 0.0]).covariant_push(&v2(1.0, 0.0)), v2(0.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn contravariant_examples() {
        assert_eq!(map2([2.0, 0.0, 0.0, 1.0]).contravariant_push(&v2(1.0, 0.0)), v2(1.0, 0.0));
        assert_eq!(map2([2.0, 0.0, 0.0, 2.0]).contravariant_push(&v2(0.0, 1.0)), v2(0.0, 0.5));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(map2([2.0, 0.0, 0.0, 1.0]).push_curl(&Vector3::new(0.0, 0.0, -2.0)).z, -1.0);
        let m = AffineMap::new(3, Point::zeros(), Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))).unwrap();
        assert_eq!(m.push_curl(&Vector3::new(0.0, 0.0, 1.0)), Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(map2([2.0, 0.0, 0.0, 2.0]).push_div(2.0), 0.5);
        assert_eq!(map2([2.0, 0.0, 0.0, 1.0]).push_gradient(&v2(2.0, 0.0)), v2(1.0, 0.0));
    }

    #[test]
    fn rt_divergence_on_stretched_cell() {
        let m = map2([2.0, 0.0, 0.0, 1.0]);
        let e = VectorElement::new(VectorFamily::Rt, 0, ReferenceSimplex::Triangle, ScalarFamily::Lagrange).unwrap();
        let d = e.div(&Point::new(0.2, 0.2, 0.0)).unwrap();
        assert_eq!(d.iter().map(|x| m.push_div(*x).abs()).collect::<Vec<_>>(), vec![1.0; 3]);
    }

    #[test]
    fn vertices_are_reproduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in [ReferenceSimplex::Triangle, ReferenceSimplex::Tetrahedron] {
            let x: Vec<Point> = (0..s.num_vertices())
                .map(|_| {
                    let mut p = Point::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                    if s.dim() == 2 {
                        p.z = 0.0;
                    }
                    p
                })
                .collect();
            let m = AffineMap::from_vertices(s, &x).unwrap();
            for (k, xk) in x.iter().enumerate() {
                assert_abs_diff_eq!(m.map_point(&s.vertex(k)), *xk, epsilon = 1e-14);
                assert_abs_diff_eq!(m.pull_point(xk), s.vertex(k), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_maps_are_rejected() {
        assert!(AffineMap::from_matrix2(Vector2::zeros(), Matrix2::new(1.0, 2.0, 2.0, 4.0)).is_err());
        assert!(AffineMap::new(4, Point::zeros(), Matrix3::identity()).is_err());
    }

    #[test]
    fn gradient_push_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = ReferenceSimplex::Tetrahedron;
        let b = ScalarBasis::new(ScalarFamily::Bernstein, 3, s).unwrap();
        let m = AffineMap::new(3, Point::new(0.3, -0.1, 0.2), Matrix3::new(1.2, 0.3, -0.2, 0.1, 0.9, 0.4, -0.3, 0.2, 1.1)).unwrap();
        let h = 1e-6;
        for _ in 0..10 {
            let xi = s.random_point(&mut rng) * 0.9 + s.centroid() * 0.1;
            let x = m.map_point(&xi);
            let g = b.gradient(&xi).unwrap();
            for c in 0..3 {
                let mut d = Point::zeros();
                d[c] = h;
                let vp = b.tabulate(&m.pull_point(&(x + d)), false).values;
                let vm = b.tabulate(&m.pull_point(&(x - d)), false).values;
                for i in 0..b.len() {
                    let fd = (vp[i] - vm[i]) / (2.0 * h);
                    assert!((fd - m.push_gradient(&g[i])[c]).abs() < 1e-6);
                }
            }
        }
    }
}
