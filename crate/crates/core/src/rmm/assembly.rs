use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::{DiscreteSystem, Discretization, ManufacturedSolution, MaterialParams2D, MaterialParams3D};
use crate::error::{domain, Result};
use crate::quadrature::{self, QuadratureRule};
use crate::sparse::CsrMatrix;

const CHUNK: usize = 512;

/// Reference values of both elements at the points of one rule.
pub(super) struct Samples {
    pub rule: QuadratureRule,
    pub phi: Vec<Vec<f64>>,
    pub grad: Vec<Vec<Vector3<f64>>>,
    pub psi: Vec<Vec<Vector3<f64>>>,
    pub curl: Vec<Vec<Vector3<f64>>>,
}

impl Samples {
    pub fn new(disc: &Discretization, degree: usize) -> Result<Self> {
        let dim = disc.mesh.dim();
        let rule = quadrature::rule(dim, degree.min(quadrature::max_degree(dim)))?;
        let mut s = Samples { phi: vec![], grad: vec![], psi: vec![], curl: vec![], rule };
        for x in &s.rule.points {
            let t = disc.h1.tabulate(x, false);
            s.phi.push(t.values);
            s.grad.push(t.gradients);
            let v = disc.hcurl.tabulate(x);
            s.curl.push((0..disc.hcurl.len()).map(|j| v.curl(j)).collect());
            s.psi.push(v.values);
        }
        Ok(s)
    }
}

pub(super) fn max_degree(disc: &Discretization) -> usize {
    disc.h1.order().max(disc.hcurl.polynomial_degree())
}

/// Coefficients of the isotropic pair form
/// `c0 delta_rs a.a' + c1 a_s a'_r + c2 a_r a'_s`.
#[derive(Clone, Copy, Debug)]
struct Law {
    a: [f64; 3],
    b: [f64; 3],
    k: f64,
}

/// `sum_q w a_i a_j^T` over the reference cell for every pair of local
/// functions; `a` is the gradient of a scalar or minus a vector function,
/// `b` the vector function and `k` its curl.
struct ReferenceTensors {
    ns: usize,
    nv: usize,
    ra: Vec<Matrix3<f64>>,
    rb: Vec<Matrix3<f64>>,
    rk: Vec<Matrix3<f64>>,
}

impl ReferenceTensors {
    fn new(s: &Samples, ns: usize, nv: usize) -> Self {
        let n = ns + nv;
        let mut ra = vec![Matrix3::zeros(); n * n];
        let mut rb = vec![Matrix3::zeros(); nv * nv];
        let mut rk = vec![Matrix3::zeros(); nv * nv];
        for (q, w) in s.rule.weights.iter().enumerate() {
            let a: Vec<Vector3<f64>> = s.grad[q].iter().copied().chain(s.psi[q].iter().map(|v| -v)).collect();
            for i in 0..n {
                for j in 0..n {
                    ra[i * n + j] += a[i] * a[j].transpose() * *w;
                }
            }
            for i in 0..nv {
                for j in 0..nv {
                    rb[i * nv + j] += s.psi[q][i] * s.psi[q][j].transpose() * *w;
                    rk[i * nv + j] += s.curl[q][i] * s.curl[q][j].transpose() * *w;
                }
            }
        }
        Self { ns, nv, ra, rb, rk }
    }
}

fn check(disc: &Discretization, ms: &ManufacturedSolution, dim: usize) -> Result<()> {
    if disc.mesh.dim() != dim || ms.dim != dim {
        return domain(format!(
            "{dim}D problem on a {}D mesh with {}D data",
            disc.mesh.dim(),
            ms.dim
        ));
    }
    Ok(())
}

/// Antiplane shear:
/// `mu_e <grad du - dp, grad u - p> + mu_micro <dp, p> + mu_macro L_c^2 rot dp rot p`.
pub fn assemble_antiplane(disc: &Discretization, params: &MaterialParams2D, ms: &ManufacturedSolution) -> Result<DiscreteSystem> {
    params.validate()?;
    check(disc, ms, 2)?;
    let law = Law {
        a: [params.mu_e, 0.0, 0.0],
        b: [params.mu_micro, 0.0, 0.0],
        k: params.mu_macro * params.l_c * params.l_c,
    };
    assemble(disc, law, ms)
}

/// Full 3D continuum with `C_e`, `C_c` acting on `Du - P`, `C_micro` on `P`
/// and `mu_macro L_c^2 <Curl dP, Curl P>`.
pub fn assemble_rmm3d(disc: &Discretization, params: &MaterialParams3D, ms: &ManufacturedSolution) -> Result<DiscreteSystem> {
    params.validate()?;
    check(disc, ms, 3)?;
    let law = Law {
        a: [params.mu_e + params.mu_c, params.mu_e - params.mu_c, params.lambda_e],
        b: [params.mu_micro, params.mu_micro, params.lambda_micro],
        k: params.mu_macro * params.l_c * params.l_c,
    };
    assemble(disc, law, ms)
}

fn sparsity(disc: &Discretization) -> CsrMatrix {
    let n = disc.num_dofs();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in 0..disc.mesh.num_cells() {
        let idx = disc.cell_indices(c);
        for &i in &idx {
            rows[i].extend_from_slice(&idx);
            if rows[i].len() > 4096 {
                rows[i].sort_unstable();
                rows[i].dedup();
            }
        }
    }
    CsrMatrix::from_pattern(n, rows)
}

fn assemble(disc: &Discretization, law: Law, ms: &ManufacturedSolution) -> Result<DiscreteSystem> {
    let deg = max_degree(disc);
    let stiff = Samples::new(disc, 2 * deg + 2)?;
    let load = Samples::new(disc, 2 * deg + 4)?;
    let (ns, nv) = (disc.h1.len(), disc.hcurl.len());
    let tensors = ReferenceTensors::new(&stiff, ns, nv);
    let rows = disc.rows();
    let mut matrix = sparsity(disc);
    let mut rhs = vec![0.0; disc.num_dofs()];
    let cells: Vec<usize> = (0..disc.mesh.num_cells()).collect();
    for chunk in cells.chunks(CHUNK) {
        let locals: Vec<(Vec<f64>, Vec<f64>)> =
            chunk.par_iter().map(|&c| local_system(disc, c, &tensors, &load, law, ms, rows)).collect();
        for (&c, (k, f)) in chunk.iter().zip(locals) {
            let idx = disc.cell_indices(c);
            let m = idx.len();
            for a in 0..m {
                rhs[idx[a]] += f[a];
                for b in 0..m {
                    matrix.add(idx[a], idx[b], k[a * m + b]);
                }
            }
        }
    }
    let n_u = rows * disc.dofs_u.num_dofs();
    let constraints = vec![None; rhs.len()];
    Ok(DiscreteSystem { matrix, rhs, n_u, constraints })
}

fn local_system(
    disc: &Discretization,
    c: usize,
    t: &ReferenceTensors,
    load: &Samples,
    law: Law,
    ms: &ManufacturedSolution,
    rows: usize,
) -> (Vec<f64>, Vec<f64>) {
    let map = disc.mesh.cell_map(c);
    let g = *map.inverse_transpose();
    let kc = map.jacobian() / map.det();
    let vol = map.det().abs();
    let (ns, nv) = (t.ns, t.nv);
    let n = ns + nv;
    let m = rows * n;
    let local = |r: usize, i: usize| if i < ns { r * ns + i } else { rows * ns + r * nv + (i - ns) };

    let mut k = vec![0.0; m * m];
    for i in 0..n {
        for j in i..n {
            let a = g * t.ra[i * n + j] * g.transpose() * vol;
            let vv = i >= ns && j >= ns;
            let (b, cu) = if vv {
                let (vi, vj) = (i - ns, j - ns);
                (
                    g * t.rb[vi * nv + vj] * g.transpose() * vol,
                    kc * t.rk[vi * nv + vj] * kc.transpose() * vol,
                )
            } else {
                (Matrix3::zeros(), Matrix3::zeros())
            };
            for r in 0..rows {
                for s in 0..rows {
                    let mut v = law.a[1] * a[(s, r)] + law.a[2] * a[(r, s)];
                    if r == s {
                        v += law.a[0] * a.trace();
                    }
                    if vv {
                        v += law.b[1] * b[(s, r)] + law.b[2] * b[(r, s)];
                        if r == s {
                            v += law.b[0] * b.trace() + law.k * cu.trace();
                        }
                    }
                    let (p, q) = (local(r, i), local(s, j));
                    k[p * m + q] = v;
                    k[q * m + p] = v;
                }
            }
        }
    }

    let mut f = vec![0.0; m];
    for (q, w) in load.rule.weights.iter().enumerate() {
        let x = map.map_point(&load.rule.points[q]);
        let fx = (ms.f)(&x);
        let mx = (ms.m)(&x);
        let w = w * vol;
        for r in 0..rows {
            for i in 0..ns {
                f[local(r, i)] += w * fx[r] * load.phi[q][i];
            }
            let mr = mx.row(r).transpose();
            for j in 0..nv {
                f[local(r, ns + j)] += w * mr.dot(&(g * load.psi[q][j]));
            }
        }
    }
    (k, f)
}

/// `(||u - u_h||, ||P - P_h||)` in L2, Frobenius norm for the tensor field.
pub fn l2_error(disc: &Discretization, coefficients: &[f64], ms: &ManufacturedSolution) -> Result<(f64, f64)> {
    if coefficients.len() != disc.num_dofs() {
        return domain(format!("{} coefficients for {} unknowns", coefficients.len(), disc.num_dofs()));
    }
    let s = Samples::new(disc, 2 * max_degree(disc) + 4)?;
    let rows = disc.rows();
    let per_cell: Vec<(f64, f64)> = (0..disc.mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let map = disc.mesh.cell_map(c);
            let g = *map.inverse_transpose();
            let vol = map.det().abs();
            let du = disc.dofs_u.cell_dofs(c);
            let dp = disc.dofs_p.cell_dofs(c);
            let (mut eu, mut ep) = (0.0, 0.0);
            for (q, w) in s.rule.weights.iter().enumerate() {
                let x = map.map_point(&s.rule.points[q]);
                let u = (ms.u)(&x);
                let p = (ms.p)(&x);
                for r in 0..rows {
                    let uh: f64 = du.iter().enumerate().map(|(i, &d)| coefficients[disc.index_u(r, d)] * s.phi[q][i]).sum();
                    let mut ph = Vector3::zeros();
                    for (j, &d) in dp.iter().enumerate() {
                        ph += g * s.psi[q][j] * coefficients[disc.index_p(r, d)];
                    }
                    eu += w * vol * (u[r] - uh).powi(2);
                    ep += w * vol * (p.row(r).transpose() - ph).norm_squared();
                }
            }
            (eu, ep)
        })
        .collect();
    let (eu, ep) = per_cell.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    Ok((eu.sqrt(), ep.sqrt()))
}
