//! Compressed sparse row matrices and the two linear solvers.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Mat, Side};

use crate::error::{domain, FemError, Result};

/// Systems smaller than this go to the sparse Cholesky factorization under
/// [`SolverKind::Auto`].
pub const DIRECT_LIMIT: usize = 20_000;
pub const CG_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given (unsorted, possibly repeated) column sets.
    pub fn from_pattern(n: usize, rows: Vec<Vec<usize>>) -> Self {
        assert_eq!(rows.len(), n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            debug_assert!(r.last().is_none_or(|&c| c < n));
            col_idx.extend_from_slice(&r);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        Self { n, row_ptr, col_idx, values }
    }

    /// Sums duplicate entries.
    pub fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows = vec![Vec::new(); n];
        for &(i, j, _) in entries {
            if i >= n || j >= n {
                return domain(format!("entry ({i}, {j}) outside a {n}x{n} matrix"));
            }
            rows[i].push(j);
        }
        let mut m = Self::from_pattern(n, rows);
        for &(i, j, v) in entries {
            m.add(i, j, v);
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::from_pattern(n, (0..n).map(|i| vec![i]).collect());
        m.values.fill(1.0);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].binary_search(&j).ok().map(|k| r.start + k)
    }

    /// Panics when `(i, j)` is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.position(i, j).unwrap_or_else(|| panic!("({i}, {j}) is not in the sparsity pattern"));
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `max |a_ij - a_ji| / max |a_ij|`.
    pub fn symmetry_error(&self) -> f64 {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// Restriction to the rows and columns with `map[i] = Some(new index)`,
    /// plus `A[free, fixed] * g` for the eliminated columns.
    pub fn eliminate(&self, map: &[Option<usize>], fixed_values: &[f64]) -> (CsrMatrix, Vec<f64>) {
        let m = map.iter().filter(|x| x.is_some()).count();
        let mut row_ptr = Vec::with_capacity(m + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut coupling = vec![0.0; m];
        for i in 0..self.n {
            let Some(ri) = map[i] else { continue };
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                match map[j] {
                    Some(cj) => {
                        col_idx.push(cj);
                        values.push(v);
                    }
                    None => coupling[ri] += v * fixed_values[j],
                }
            }
            row_ptr.push(col_idx.len());
        }
        (CsrMatrix { n: m, row_ptr, col_idx, values }, coupling)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Auto,
    ConjugateGradient,
    Direct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub method: SolverKind,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut r = vec![0.0; b.len()];
    a.mul_vec(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let nb = norm(b);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let n = a.n();
    let mut x = vec![0.0; n];
    let nb = norm(b);
    if nb == 0.0 {
        return Ok((x, 0));
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut history = Vec::new();
    for it in 1..=max_iter {
        a.mul_vec(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(FemError::NoConvergence { iterations: it, residual: norm(&r) / nb, history });
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        let res = norm(&r) / nb;
        history.push(res);
        if res < tol {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let residual = history.last().copied().unwrap_or(1.0);
    Err(FemError::NoConvergence { iterations: max_iter, residual, history })
}

/// Sparse Cholesky solve of a symmetric positive definite matrix.
pub fn solve_direct(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    // A symmetric CSR matrix is its own CSC transpose.
    let symbolic = SymbolicSparseColMatRef::new_checked(n, n, &a.row_ptr, None, &a.col_idx);
    let m = SparseColMatRef::new(symbolic, &a.values);
    let llt = m.sp_cholesky(Side::Lower).map_err(|e| FemError::Factorization(format!("{e:?}")))?;
    let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    llt.solve_in_place(rhs.as_mut());
    Ok((0..n).map(|i| rhs[(i, 0)]).collect())
}

pub fn solve(a: &CsrMatrix, b: &[f64], kind: SolverKind) -> Result<(Vec<f64>, SolveReport)> {
    let method = match kind {
        SolverKind::Auto if a.n() < DIRECT_LIMIT => SolverKind::Direct,
        SolverKind::Auto => SolverKind::ConjugateGradient,
        k => k,
    };
    let (x, iterations) = match method {
        SolverKind::Direct => (solve_direct(a, b)?, 0),
        _ => pcg(a, b, CG_TOLERANCE, 20 * a.n().max(1))?,
    };
    let residual = relative_residual(a, &x, b);
    Ok((x, SolveReport { method, iterations, residual }))
}
