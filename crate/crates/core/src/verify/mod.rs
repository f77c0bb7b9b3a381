//! Element property checks, tabulation and convergence studies.

mod checks;
mod convergence;
mod reference_curves;
mod tabulate;

use std::fmt;

use nalgebra::Vector3;

pub use checks::{
    conformity, derivative_range_dimension, derivative_rank, kernel_residual, piola_identities, unisolvence,
    ConformityOutcome, PiolaOutcome, RankOutcome, RANK_TOLERANCE,
};
pub use convergence::{converge, fit_slope, run_level, subdivisions, ConvergenceReport, Level, Problem, CSV_HEADER};
pub use reference_curves::{envelope_factor, loglog_interpolate, reference_curve};
pub use tabulate::tabulate_report;

use crate::element::{element_dimension, VectorElement};
use crate::error::Result;
use crate::reference::ReferenceSimplex;
use crate::scalar_basis::ScalarFamily;
use crate::templates::VectorFamily;

pub const DEFAULT_SEED: u64 = 20240521;
pub const CONFORMITY_TOLERANCE: f64 = 1e-10;
pub const KERNEL_TOLERANCE: f64 = 1e-12;
pub const PIOLA_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Adds `delta` to the constant part of the template behind one function,
/// to show that the checks notice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub function: usize,
    pub delta: Vector3<f64>,
}

impl Perturbation {
    pub fn uniform(function: usize, size: f64) -> Self {
        Self { function, delta: Vector3::repeat(size) }
    }
}

/// Every property check of one element, with both scalar families.
pub fn verify_element(
    family: VectorFamily,
    p: usize,
    dim: usize,
    seed: u64,
    perturb: Option<Perturbation>,
) -> Result<Vec<Check>> {
    let s = ReferenceSimplex::from_dim(dim)?;
    let mut out = Vec::new();
    for scalar in [ScalarFamily::Lagrange, ScalarFamily::Bernstein] {
        let mut el = VectorElement::new(family, p, s, scalar)?;
        if let Some(pert) = perturb {
            el.perturb_template(pert.function, pert.delta)?;
        }
        let tag = |n: &str| format!("{n} ({scalar})");

        let expected = element_dimension(family, p, s).unwrap_or(0);
        out.push(Check {
            name: tag("dimension"),
            passed: el.len() == expected,
            detail: format!("{} functions, formula {expected}", el.len()),
        });

        let r = unisolvence(&el, seed);
        out.push(Check {
            name: tag("unisolvence"),
            passed: r.full(),
            detail: format!("rank {} of {}, sigma_min/sigma_max {:.2e}", r.rank, r.expected, r.ratio),
        });

        let c = conformity(&el, seed)?;
        out.push(Check {
            name: tag("conformity"),
            passed: c.max_jump < CONFORMITY_TOLERANCE && c.positive_det && c.negative_det,
            detail: format!(
                "max relative trace jump {:.2e} over {} meshes, det J signs {}{}",
                c.max_jump,
                c.trials,
                if c.positive_det { "+" } else { "" },
                if c.negative_det { "-" } else { "" }
            ),
        });

        let (k, n) = kernel_residual(&el, seed);
        out.push(Check {
            name: tag("kernel"),
            passed: k < KERNEL_TOLERANCE,
            detail: format!("{n} kernel functions, largest residual {k:.2e}"),
        });

        let d = derivative_rank(&el, seed);
        let op = match family.space() {
            crate::templates::Space::HCurl => "curl",
            crate::templates::Space::HDiv => "div",
        };
        out.push(Check {
            name: tag("derivative span"),
            passed: d.full(),
            detail: format!("rank of {op} {} of {}", d.rank, d.expected),
        });
    }
    let pi = piola_identities(seed, 20)?;
    out.push(Check {
        name: "piola".into(),
        passed: pi.worst() < PIOLA_TOLERANCE,
        detail: format!(
            "{} maps, circulation {:.1e}, flux {:.1e}, curl {:.1e}, div {:.1e}, gradient {:.1e}",
            pi.maps, pi.circulation, pi.flux, pi.curl, pi.div, pi.gradient
        ),
    });
    Ok(out)
}
