//! The relaxed micromorphic model problems: antiplane shear on
//! `(-1, 1)^2` and the full 3D continuum on `(-1, 1)^3`, discretized with an
//! H1 displacement and an H(curl) microdistortion.

mod assembly;
mod manufactured;
mod projection;

use std::fmt;
use std::str::FromStr;

pub use assembly::{assemble_antiplane, assemble_rmm3d, l2_error};
pub use manufactured::{Field, ManufacturedSolution};
pub use projection::{apply_dirichlet, interpolate};

use crate::element::VectorElement;
use crate::error::{domain, FemError, Result};
use crate::mesh::{build_dof_map, DofMap, SimplicialMesh};
use crate::scalar_basis::{ScalarBasis, ScalarFamily};
use crate::sparse::{self, CsrMatrix, SolveReport, SolverKind};
use crate::templates::VectorFamily;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams2D {
    pub mu_e: f64,
    pub mu_micro: f64,
    pub mu_macro: f64,
    pub l_c: f64,
}

impl Default for MaterialParams2D {
    fn default() -> Self {
        Self { mu_e: 1.0, mu_micro: 1.0, mu_macro: 1.0, l_c: 1.0 }
    }
}

impl MaterialParams2D {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_e > 0.0 && self.mu_micro > 0.0 && self.mu_macro > 0.0 && self.l_c >= 0.0) {
            return domain(format!("invalid antiplane parameters {self:?}"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams3D {
    pub lambda_e: f64,
    pub mu_e: f64,
    pub lambda_micro: f64,
    pub mu_micro: f64,
    pub mu_c: f64,
    pub mu_macro: f64,
    pub l_c: f64,
}

impl Default for MaterialParams3D {
    fn default() -> Self {
        Self { lambda_e: 1.0, mu_e: 1.0, lambda_micro: 1.0, mu_micro: 1.0, mu_c: 0.0, mu_macro: 1.0, l_c: 1.0 }
    }
}

impl MaterialParams3D {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu_e > 0.0 && self.mu_micro > 0.0 && self.mu_macro > 0.0 && self.mu_c >= 0.0 && self.l_c >= 0.0;
        if !ok {
            return domain(format!("invalid 3D parameters {self:?}"));
        }
        Ok(())
    }
}

/// Scalar family and order `p` for the displacement, paired with an
/// H(curl) element of order `p - 1` built on the same scalar family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    pub scalar: ScalarFamily,
    pub order: usize,
    pub vector: VectorFamily,
}

impl Pairing {
    pub const L1_N1_0: Pairing = Pairing { scalar: ScalarFamily::Lagrange, order: 1, vector: VectorFamily::N1 };
    pub const L2_N2_1: Pairing = Pairing { scalar: ScalarFamily::Lagrange, order: 2, vector: VectorFamily::N2 };
    pub const B3_N1_2: Pairing = Pairing { scalar: ScalarFamily::Bernstein, order: 3, vector: VectorFamily::N1 };
    pub const B3_N2_2: Pairing = Pairing { scalar: ScalarFamily::Bernstein, order: 3, vector: VectorFamily::N2 };

    pub fn new(scalar: ScalarFamily, order: usize, vector: VectorFamily) -> Result<Self> {
        let p = Self { scalar, order, vector };
        p.validate()?;
        Ok(p)
    }

    pub fn vector_order(&self) -> usize {
        self.order.saturating_sub(1)
    }

    fn validate(&self) -> Result<()> {
        if !matches!(self.vector, VectorFamily::N1 | VectorFamily::N2) {
            return Err(FemError::Pairing(format!("{} is not an H(curl) family", self.vector)));
        }
        if self.order < 1 || self.order < self.vector.min_order() + 1 {
            return Err(FemError::Pairing(format!(
                "order {} displacement needs an order {} {} element, which does not exist",
                self.order,
                self.order as i64 - 1,
                self.vector
            )));
        }
        Ok(())
    }

    pub fn elements(&self, dim: usize) -> Result<(ScalarBasis, VectorElement)> {
        self.validate()?;
        let simplex = crate::reference::ReferenceSimplex::from_dim(dim)?;
        let h1 = ScalarBasis::new(self.scalar, self.order, simplex)?;
        let hcurl = VectorElement::new(self.vector, self.vector_order(), simplex, self.scalar)?;
        Ok((h1, hcurl))
    }

    /// Short labels for reports, e.g. `("L1", "N1_0")`.
    pub fn labels(&self) -> (String, String) {
        (format!("{}{}", self.scalar.letter(), self.order), format!("{}_{}", self.vector.name().to_uppercase(), self.vector_order()))
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, p) = self.labels();
        write!(f, "{}-{}", u.to_lowercase(), p.to_lowercase())
    }
}

impl FromStr for Pairing {
    type Err = FemError;

    /// Parses labels such as `l1-n1_0` or `b3-n2_2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || FemError::Pairing(format!("cannot parse {s:?}; expected e.g. l1-n1_0 or b3-n2_2"));
        let lower = s.to_ascii_lowercase();
        let (u, p) = lower.split_once('-').ok_or_else(bad)?;
        let scalar = match u.chars().next() {
            Some('l') => ScalarFamily::Lagrange,
            Some('b') => ScalarFamily::Bernstein,
            _ => return Err(bad()),
        };
        let order: usize = u[1..].parse().map_err(|_| bad())?;
        let (fam, q) = p.split_once('_').ok_or_else(bad)?;
        let vector: VectorFamily = fam.parse().map_err(|_| bad())?;
        let q: usize = q.parse().map_err(|_| bad())?;
        if q + 1 != order {
            return Err(FemError::Pairing(format!("{s}: the H(curl) order must be one below the H1 order")));
        }
        Pairing::new(scalar, order, vector)
    }
}

/// Mesh, elements and DOF maps of one discretization.  Unknowns are laid
/// out as `rows` copies of the H1 block followed by `rows` copies of the
/// H(curl) block, with `rows = 1` in 2D and `3` in 3D.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: SimplicialMesh,
    pub h1: ScalarBasis,
    pub hcurl: VectorElement,
    pub dofs_u: DofMap,
    pub dofs_p: DofMap,
}

impl Discretization {
    pub fn new(mesh: SimplicialMesh, h1: ScalarBasis, hcurl: VectorElement) -> Result<Self> {
        if h1.simplex() != mesh.simplex() || hcurl.simplex() != mesh.simplex() {
            return domain("element and mesh dimensions differ");
        }
        if hcurl.space() != crate::templates::Space::HCurl {
            return Err(FemError::Pairing(format!("{} is not H(curl)-conforming", hcurl.family())));
        }
        let dofs_u = build_dof_map(&mesh, &h1)?;
        let dofs_p = build_dof_map(&mesh, &hcurl)?;
        Ok(Self { mesh, h1, hcurl, dofs_u, dofs_p })
    }

    pub fn from_pairing(mesh: SimplicialMesh, pairing: Pairing) -> Result<Self> {
        let (h1, hcurl) = pairing.elements(mesh.dim())?;
        Self::new(mesh, h1, hcurl)
    }

    pub fn rows(&self) -> usize {
        if self.mesh.dim() == 2 {
            1
        } else {
            3
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.rows() * (self.dofs_u.num_dofs() + self.dofs_p.num_dofs())
    }

    pub fn index_u(&self, row: usize, dof: usize) -> usize {
        row * self.dofs_u.num_dofs() + dof
    }

    pub fn index_p(&self, row: usize, dof: usize) -> usize {
        self.rows() * self.dofs_u.num_dofs() + row * self.dofs_p.num_dofs() + dof
    }

    /// Global indices of all local unknowns of cell `c`, in local order.
    pub fn cell_indices(&self, c: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.rows() * (self.h1.len() + self.hcurl.len()));
        for r in 0..self.rows() {
            out.extend(self.dofs_u.cell_dofs(c).iter().map(|&d| self.index_u(r, d)));
        }
        for r in 0..self.rows() {
            out.extend(self.dofs_p.cell_dofs(c).iter().map(|&d| self.index_p(r, d)));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct DiscreteSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Number of displacement unknowns; the rest belong to the microdistortion.
    pub n_u: usize,
    /// Prescribed values, filled by [`apply_dirichlet`].
    pub constraints: Vec<Option<f64>>,
}

impl DiscreteSystem {
    pub fn num_constrained(&self) -> usize {
        self.constraints.iter().filter(|c| c.is_some()).count()
    }
}

/// Eliminates the constraints, solves the reduced system and returns the
/// full coefficient vector.
pub fn solve(system: &DiscreteSystem, kind: SolverKind) -> Result<(Vec<f64>, SolveReport)> {
    let n = system.rhs.len();
    let mut map = vec![None; n];
    let mut fixed = vec![0.0; n];
    let mut free = Vec::new();
    for i in 0..n {
        match system.constraints[i] {
            Some(v) => fixed[i] = v,
            None => {
                map[i] = Some(free.len());
                free.push(i);
            }
        }
    }
    let (a, coupling) = system.matrix.eliminate(&map, &fixed);
    let b: Vec<f64> = free.iter().zip(&coupling).map(|(&i, c)| system.rhs[i] - c).collect();
    let (x, report) = sparse::solve(&a, &b, kind)?;
    let mut out = fixed;
    for (k, &i) in free.iter().enumerate() {
        out[i] = x[k];
    }
    Ok((out, report))
}
