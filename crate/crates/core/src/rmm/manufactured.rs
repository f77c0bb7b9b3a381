use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use super::{MaterialParams2D, MaterialParams3D};
use crate::reference::Point;

pub type Field<T> = Arc<dyn Fn(&Point) -> T + Send + Sync>;

/// Prescribed fields and the loads that make them exact.
///
/// Both problems share one layout: in 2D the displacement sits in `u[0]`
/// and the microdistortion in the first row of `p` (`m` likewise).
#[derive(Clone)]
pub struct ManufacturedSolution {
    pub name: String,
    pub dim: usize,
    pub u: Field<Vector3<f64>>,
    pub p: Field<Matrix3<f64>>,
    pub f: Field<Vector3<f64>>,
    pub m: Field<Matrix3<f64>>,
}

impl fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedSolution").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

fn row0(v: Vector3<f64>) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    m.set_row(0, &v.transpose());
    m
}

fn sym(a: &Matrix3<f64>) -> Matrix3<f64> {
    (a + a.transpose()) * 0.5
}

fn skew(a: &Matrix3<f64>) -> Matrix3<f64> {
    (a - a.transpose()) * 0.5
}

impl MaterialParams3D {
    /// `lambda_e tr(S) I + 2 mu_e S` with `S = sym(A)`.
    pub fn c_e(&self, a: &Matrix3<f64>) -> Matrix3<f64> {
        let s = sym(a);
        Matrix3::identity() * (self.lambda_e * s.trace()) + s * (2.0 * self.mu_e)
    }

    pub fn c_micro(&self, a: &Matrix3<f64>) -> Matrix3<f64> {
        let s = sym(a);
        Matrix3::identity() * (self.lambda_micro * s.trace()) + s * (2.0 * self.mu_micro)
    }

    pub fn c_c(&self, a: &Matrix3<f64>) -> Matrix3<f64> {
        skew(a) * (2.0 * self.mu_c)
    }
}

impl ManufacturedSolution {
    pub fn zero(dim: usize) -> Self {
        Self {
            name: "zero".into(),
            dim,
            u: Arc::new(|_| Vector3::zeros()),
            p: Arc::new(|_| Matrix3::zeros()),
            f: Arc::new(|_| Vector3::zeros()),
            m: Arc::new(|_| Matrix3::zeros()),
        }
    }

    /// Antiplane shear on `(-1, 1)^2` with a kink along `x = 0`:
    /// `u = (1 - y^2)(e^{1 - |x|} - 1)`, `p = grad u`, `f = 0`,
    /// `m = mu_micro p`.
    pub fn antiplane(params: &MaterialParams2D) -> Self {
        let u = |x: &Point| (1.0 - x.y * x.y) * ((1.0 - x.x.abs()).exp() - 1.0);
        let p = |x: &Point| {
            let s = if x.x <= 0.0 { 1.0 } else { -1.0 };
            let e = (1.0 - x.x.abs()).exp();
            Vector3::new(s * (1.0 - x.y * x.y) * e, 2.0 * x.y * (1.0 - e), 0.0)
        };
        let mu = params.mu_micro;
        Self {
            name: "antiplane".into(),
            dim: 2,
            u: Arc::new(move |x| Vector3::new(u(x), 0.0, 0.0)),
            p: Arc::new(move |x| row0(p(x))),
            f: Arc::new(|_| Vector3::zeros()),
            m: Arc::new(move |x| row0(p(x) * mu)),
        }
    }

    /// Fields of the 3D problem for unit material constants and `mu_c = 0`:
    /// `u = (0, 0, sin(pi x))`,
    /// `P = Du + 10 (1 - y^2)(1 - z^2) sin(pi x) [[0,0,0],[0,0,0],[0,-z,y]]`.
    pub fn rmm3d() -> Self {
        let p = |x: &Point| {
            let (s, c) = (PI * x.x).sin_cos();
            let b = 10.0 * (1.0 - x.y * x.y) * (1.0 - x.z * x.z) * s;
            Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, PI * c, -x.z * b, x.y * b)
        };
        let f = |x: &Point| {
            let (s, c) = (PI * x.x).sin_cos();
            let (y, z) = (x.y, x.z);
            Vector3::new(
                10.0 * PI * y * (y * y - 1.0) * (z * z - 1.0) * c,
                20.0 * (z * z - y * y) * s,
                20.0 * y * z * (3.0 * y * y - z * z - 2.0) * s,
            )
        };
        let m = |x: &Point| {
            let (s, c) = (PI * x.x).sin_cos();
            let (y, z) = (x.y, x.z);
            let q = (y * y - 1.0) * (z * z - 1.0);
            let pi2 = PI * PI;
            Matrix3::new(
                20.0 * y * q * s,
                0.0,
                PI * c,
                0.0,
                20.0 * y * q * s,
                -20.0 * z * q * s,
                PI * (20.0 * y.powi(3) * z - 20.0 * y * z.powi(3) + 1.0) * c,
                z * (120.0 * y * y - 10.0 * pi2 * q - 20.0 * q - 80.0) * s,
                y * (-120.0 * z * z + 60.0 * q + 10.0 * pi2 * q + 80.0) * s,
            )
        };
        Self {
            name: "rmm3d".into(),
            dim: 3,
            u: Arc::new(|x| Vector3::new(0.0, 0.0, (PI * x.x).sin())),
            p: Arc::new(p),
            f: Arc::new(f),
            m: Arc::new(m),
        }
    }

    /// `u = c + a . x`, constant `p`.
    pub fn antiplane_patch(params: &MaterialParams2D, a: [f64; 2], c: f64, p: [f64; 2]) -> Self {
        let a = Vector3::new(a[0], a[1], 0.0);
        let p = Vector3::new(p[0], p[1], 0.0);
        let m = -(a - p) * params.mu_e + p * params.mu_micro;
        Self {
            name: "antiplane-patch".into(),
            dim: 2,
            u: Arc::new(move |x| Vector3::new(c + a.dot(x), 0.0, 0.0)),
            p: Arc::new(move |_| row0(p)),
            f: Arc::new(|_| Vector3::zeros()),
            m: Arc::new(move |_| row0(m)),
        }
    }

    /// `u = c + A x`, constant `P`.
    pub fn rmm3d_patch(params: &MaterialParams3D, a: Matrix3<f64>, c: Vector3<f64>, p: Matrix3<f64>) -> Self {
        let e = a - p;
        let m = -params.c_e(&e) - params.c_c(&e) + params.c_micro(&p);
        Self {
            name: "rmm3d-patch".into(),
            dim: 3,
            u: Arc::new(move |x| c + a * x),
            p: Arc::new(move |_| p),
            f: Arc::new(|_| Vector3::zeros()),
            m: Arc::new(move |_| m),
        }
    }
}
