//! Collapsed-coordinate Gauss rules on the line, triangle and tetrahedron.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{FemError, Result};
use crate::reference::Point;

pub const MAX_DEGREE_2D: usize = 14;
pub const MAX_DEGREE_3D: usize = 10;
pub const MAX_DEGREE_1D: usize = 30;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    pub degree: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss-Jacobi nodes and weights on `[0, 1]` for the weight `(1 - t)^alpha`,
/// computed with the Golub-Welsch algorithm.
pub fn gauss_jacobi(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let a = alpha;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a;
        t[(k, k)] = if k == 0 { -a / (a + 2.0) } else { -a * a / (s * (s + 2.0)) };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a;
            let beta = 4.0 * k1 * (k1 + a) * k1 * (k1 + a) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0));
            t[(k, k + 1)] = beta.sqrt();
            t[(k + 1, k)] = beta.sqrt();
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, v0 * v0 / (a + 1.0))
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

fn points_for(degree: usize) -> usize {
    degree / 2 + 1
}

/// Gauss-Legendre rule on `[0, 1]`, stored in the first coordinate.
pub fn line_rule(degree: usize) -> Result<QuadratureRule> {
    if degree > MAX_DEGREE_1D {
        return Err(FemError::DegreeTooHigh { requested: degree, max: MAX_DEGREE_1D, dim: 1 });
    }
    let (x, w) = gauss_jacobi(points_for(degree), 0.0);
    Ok(QuadratureRule {
        dim: 1,
        degree,
        points: x.iter().map(|&t| Point::new(t, 0.0, 0.0)).collect(),
        weights: w,
    })
}

/// Rule on the reference triangle (`dim = 2`) or tetrahedron (`dim = 3`)
/// integrating every polynomial of total degree `degree` exactly.
pub fn rule(dim: usize, degree: usize) -> Result<QuadratureRule> {
    let n = points_for(degree);
    match dim {
        1 => line_rule(degree),
        2 => {
            if degree > MAX_DEGREE_2D {
                return Err(FemError::DegreeTooHigh { requested: degree, max: MAX_DEGREE_2D, dim });
            }
            let (s, ws) = gauss_jacobi(n, 0.0);
            let (t, wt) = gauss_jacobi(n, 1.0);
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for (ti, wti) in t.iter().zip(&wt) {
                for (si, wsi) in s.iter().zip(&ws) {
                    points.push(Point::new(si * (1.0 - ti), *ti, 0.0));
                    weights.push(wsi * wti);
                }
            }
            Ok(QuadratureRule { dim, degree, points, weights })
        }
        3 => {
            if degree > MAX_DEGREE_3D {
                return Err(FemError::DegreeTooHigh { requested: degree, max: MAX_DEGREE_3D, dim });
            }
            let (r, wr) = gauss_jacobi(n, 0.0);
            let (s, ws) = gauss_jacobi(n, 1.0);
            let (t, wt) = gauss_jacobi(n, 2.0);
            let mut points = Vec::with_capacity(n * n * n);
            let mut weights = Vec::with_capacity(n * n * n);
            for (ti, wti) in t.iter().zip(&wt) {
                for (si, wsi) in s.iter().zip(&ws) {
                    for (ri, wri) in r.iter().zip(&wr) {
                        points.push(Point::new(ri * (1.0 - si) * (1.0 - ti), si * (1.0 - ti), *ti));
                        weights.push(wri * wsi * wti);
                    }
                }
            }
            Ok(QuadratureRule { dim, degree, points, weights })
        }
        _ => Err(FemError::Domain(format!("no quadrature in dimension {dim}"))),
    }
}

/// Largest degree available in `dim`.
pub fn max_degree(dim: usize) -> usize {
    match dim {
        1 => MAX_DEGREE_1D,
        2 => MAX_DEGREE_2D,
        _ => MAX_DEGREE_3D,
    }
}
