//! Acceptance suite: one line per criterion, exit status 1 on any failure
//! outside the known first-type Lagrange order-2 rank deficiency.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{Matrix3, Vector3};
use polytope_fem::rmm::solve;
use polytope_fem::verify::{
    self, conformity, derivative_rank, envelope_factor, kernel_residual, piola_identities, unisolvence, Problem,
};
use polytope_fem::{
    apply_dirichlet, assemble_antiplane, assemble_rmm3d, l2_error, structured_mesh, Discretization,
    ManufacturedSolution, MaterialParams2D, MaterialParams3D, Pairing, ReferenceSimplex, ScalarFamily, SolverKind,
    VectorElement, VectorFamily,
};

const SEED: u64 = 20240521;
const TRI: ReferenceSimplex = ReferenceSimplex::Triangle;
const TET: ReferenceSimplex = ReferenceSimplex::Tetrahedron;
const SCALARS: [ScalarFamily; 2] = [ScalarFamily::Lagrange, ScalarFamily::Bernstein];

type Case = (VectorFamily, usize, ReferenceSimplex);

/// Tuples whose Lagrange-based construction is rank deficient.
fn known_deficient() -> BTreeSet<String> {
    ["n1 p=2 triangle lagrange", "rt p=2 triangle lagrange"].iter().map(|s| s.to_string()).collect()
}

fn tag(c: &Case, s: ScalarFamily) -> String {
    format!("{} p={} {} {s}", c.0, c.1, c.2.name())
}

fn supported(max_2d_second: usize, max_2d_first: usize, max_3d: usize) -> Vec<Case> {
    let mut v = Vec::new();
    for p in 1..=max_2d_second {
        v.push((VectorFamily::N2, p, TRI));
        v.push((VectorFamily::Bdm, p, TRI));
    }
    for p in 0..=max_2d_first {
        v.push((VectorFamily::N1, p, TRI));
        v.push((VectorFamily::Rt, p, TRI));
    }
    for p in 1..=max_3d {
        v.push((VectorFamily::N2, p, TET));
        v.push((VectorFamily::Bdm, p, TET));
    }
    v.push((VectorFamily::N1, 0, TET));
    v
}

struct Outcome {
    passed: bool,
    detail: String,
    /// Failing cases that are all documented deficiencies.
    known: bool,
}

fn report(id: usize, name: &str, limit: f64, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let mut o = f();
    let secs = t.elapsed().as_secs_f64();
    if secs > limit {
        o.passed = false;
        o.known = false;
        o.detail.push_str(&format!("; over the {limit:.0} s budget"));
    }
    let status = match (o.passed, o.known) {
        (true, _) => "PASS",
        (false, true) => "FAIL (known)",
        (false, false) => "FAIL",
    };
    println!("[{status}] {id} {name}: {} ({secs:.2} s, limit {limit:.0} s)", o.detail);
    o.passed || o.known
}

fn by_failures(checked: usize, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        return Outcome { passed: true, detail: format!("{checked} cases"), known: false };
    }
    let known = failures.iter().all(|f| known_deficient().iter().any(|k| f.starts_with(k.as_str())));
    Outcome { passed: false, detail: format!("{checked} cases, failing: {}", failures.join("; ")), known }
}

fn dimension_formulas() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    let expect = |c: &Case| match (c.0, c.2) {
        (VectorFamily::N2 | VectorFamily::Bdm, ReferenceSimplex::Triangle) => (c.1 + 2) * (c.1 + 1),
        (VectorFamily::N1 | VectorFamily::Rt, ReferenceSimplex::Triangle) => (c.1 + 3) * (c.1 + 1),
        (VectorFamily::N2 | VectorFamily::Bdm, ReferenceSimplex::Tetrahedron) => (c.1 + 3) * (c.1 + 2) * (c.1 + 1) / 2,
        _ => 6,
    };
    for c in supported(4, 3, 3) {
        for s in SCALARS {
            n += 1;
            let len = VectorElement::new(c.0, c.1, c.2, s).map(|e| e.len()).unwrap_or(0);
            if len != expect(&c) {
                bad.push(format!("{} has {len}, formula {}", tag(&c, s), expect(&c)));
            }
        }
    }
    by_failures(n, bad)
}

fn unisolvence_all() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    let mut worst = f64::INFINITY;
    for c in supported(4, 3, 3) {
        for s in SCALARS {
            n += 1;
            let e = VectorElement::new(c.0, c.1, c.2, s).expect("supported");
            let r = unisolvence(&e, SEED);
            if r.full() {
                worst = worst.min(r.ratio);
            } else {
                bad.push(format!("{} rank {} of {}", tag(&c, s), r.rank, r.expected));
            }
        }
    }
    let mut o = by_failures(n, bad);
    o.detail.push_str(&format!(", smallest sigma ratio among full-rank cases {worst:.2e} (threshold 1e-8)"));
    o
}

fn conformity_all() -> Outcome {
    let mut bad = Vec::new();
    let (mut n, mut worst, mut signs) = (0, 0.0f64, (true, true));
    for c in supported(3, 3, 3) {
        for s in SCALARS {
            n += 1;
            let e = VectorElement::new(c.0, c.1, c.2, s).expect("supported");
            let r = conformity(&e, SEED).expect("two-cell meshes");
            worst = worst.max(r.max_jump);
            signs = (signs.0 && r.positive_det, signs.1 && r.negative_det);
            if r.max_jump >= 1e-10 || !r.positive_det || !r.negative_det {
                bad.push(format!("{} jump {:.2e}", tag(&c, s), r.max_jump));
            }
        }
    }
    let mut o = by_failures(n, bad);
    o.detail.push_str(&format!(
        ", largest relative jump {worst:.2e} (limit 1e-10), both det J signs in every case: {}",
        signs.0 && signs.1
    ));
    o
}

fn exact_sequence() -> Outcome {
    let mut bad = Vec::new();
    let (mut n, mut worst) = (0, 0.0f64);
    let mut cases: Vec<Case> = Vec::new();
    for p in 0..=3 {
        cases.push((VectorFamily::N1, p, TRI));
        cases.push((VectorFamily::Rt, p, TRI));
    }
    for p in 1..=4 {
        cases.push((VectorFamily::N2, p, TRI));
    }
    for c in cases {
        for s in SCALARS {
            n += 1;
            let e = VectorElement::new(c.0, c.1, c.2, s).expect("supported");
            let (k, _) = kernel_residual(&e, SEED);
            worst = worst.max(k);
            if k >= 1e-12 {
                bad.push(format!("{} kernel residual {k:.2e}", tag(&c, s)));
            }
            let r = derivative_rank(&e, SEED);
            if !r.full() {
                bad.push(format!("{} derivative rank {} of {}", tag(&c, s), r.rank, r.expected));
            }
        }
    }
    let mut o = by_failures(n, bad);
    o.detail.push_str(&format!(", largest kernel residual {worst:.2e} (limit 1e-12)"));
    o
}

fn piola() -> Outcome {
    let r = piola_identities(SEED, 20).expect("random maps");
    Outcome {
        passed: r.worst() < 1e-6,
        detail: format!(
            "{} maps: circulation {:.1e}, flux {:.1e}, curl {:.1e}, div {:.1e}, gradient {:.1e} (limit 1e-6)",
            r.maps, r.circulation, r.flux, r.curl, r.div, r.gradient
        ),
        known: false,
    }
}

fn antiplane(pairing: Pairing, su0: f64, sp0: f64, tol: f64) -> Outcome {
    let ns = verify::subdivisions(Problem::Antiplane, pairing, 5);
    let r = match verify::converge(Problem::Antiplane, pairing, &ns, SolverKind::Auto, None) {
        Ok(r) => r,
        Err(e) => return Outcome { passed: false, detail: e.to_string(), known: false },
    };
    let (su, sp) = r.slopes();
    let env = envelope_factor(&r).unwrap_or(f64::INFINITY);
    let dofs: Vec<String> = r.levels.iter().map(|l| l.dofs.to_string()).collect();
    Outcome {
        passed: (su - su0).abs() <= tol && (sp - sp0).abs() <= tol && env <= 10.0,
        detail: format!(
            "{pairing}: slope_u {su:.3} (target {su0}), slope_p {sp:.3} (target {sp0}), tolerance {tol}; \
             unknowns {}; largest factor to published errors {env:.2} (limit 10)",
            dofs.join("/")
        ),
        known: false,
    }
}

fn rmm3d(pairing: Pairing, su0: f64, sp0: f64, tol: f64) -> Outcome {
    let ns = verify::subdivisions(Problem::Rmm3d, pairing, 3);
    let r = match verify::converge(Problem::Rmm3d, pairing, &ns, SolverKind::Auto, None) {
        Ok(r) => r,
        Err(e) => return Outcome { passed: false, detail: e.to_string(), known: false },
    };
    let (su, sp) = r.slopes_over(2);
    let max_dofs = r.levels.iter().map(|l| l.dofs).max().unwrap_or(0);
    let dofs: Vec<String> = r.levels.iter().map(|l| l.dofs.to_string()).collect();
    Outcome {
        passed: (su - su0).abs() <= tol && (sp - sp0).abs() <= tol && max_dofs <= 60_000,
        detail: format!(
            "{pairing}: slope_u {su:.3} (target {su0}), slope_P {sp:.3} (target {sp0}), tolerance {tol}; unknowns {}",
            dofs.join("/")
        ),
        known: false,
    }
}

fn patch_tests() -> Outcome {
    let mut bad = Vec::new();
    let (mut n, mut worst) = (0, 0.0f64);
    let p2 = MaterialParams2D { mu_e: 1.3, mu_micro: 0.7, mu_macro: 2.0, l_c: 0.5 };
    for pairing in [Pairing::L1_N1_0, Pairing::L2_N2_1, Pairing::B3_N1_2, Pairing::B3_N2_2] {
        for level in [2, 4] {
            for (a, c, p) in [([0.0, 0.0], 1.5, [0.0, 0.0]), ([0.3, 0.8], 2.0, [-1.2, 0.4])] {
                n += 1;
                let ms = ManufacturedSolution::antiplane_patch(&p2, a, c, p);
                let disc = Discretization::from_pairing(structured_mesh(2, level).unwrap(), pairing).unwrap();
                let mut sys = assemble_antiplane(&disc, &p2, &ms).unwrap();
                apply_dirichlet(&mut sys, &disc, &ms).unwrap();
                let (x, _) = solve(&sys, SolverKind::Auto).unwrap();
                let (eu, ep) = l2_error(&disc, &x, &ms).unwrap();
                worst = worst.max(eu).max(ep);
                if eu.max(ep) >= 1e-8 {
                    bad.push(format!("antiplane {pairing} n={level}: {eu:.1e} {ep:.1e}"));
                }
            }
        }
    }
    let p3 = MaterialParams3D { mu_c: 0.4, ..Default::default() };
    let a = Matrix3::new(0.2, -0.1, 0.4, 0.3, 0.5, -0.2, -0.6, 0.1, 0.3);
    let p = Matrix3::new(1.0, 0.5, -0.5, 0.0, -1.0, 2.0, 0.3, 0.2, 0.1);
    for pairing in [Pairing::L1_N1_0, Pairing::L2_N2_1, Pairing::B3_N2_2] {
        for level in [1, 2] {
            for (prm, aa, pp) in [(MaterialParams3D::default(), Matrix3::zeros(), Matrix3::zeros()), (p3, a, p)] {
                n += 1;
                let ms = ManufacturedSolution::rmm3d_patch(&prm, aa, Vector3::new(1.0, -2.0, 0.5), pp);
                let disc = Discretization::from_pairing(structured_mesh(3, level).unwrap(), pairing).unwrap();
                let mut sys = assemble_rmm3d(&disc, &prm, &ms).unwrap();
                apply_dirichlet(&mut sys, &disc, &ms).unwrap();
                let (x, _) = solve(&sys, SolverKind::Auto).unwrap();
                let (eu, ep) = l2_error(&disc, &x, &ms).unwrap();
                worst = worst.max(eu).max(ep);
                if eu.max(ep) >= 1e-8 {
                    bad.push(format!("rmm3d {pairing} n={level}: {eu:.1e} {ep:.1e}"));
                }
            }
        }
    }
    let mut o = by_failures(n, bad);
    o.detail.push_str(&format!(", largest L2 error {worst:.1e} (limit 1e-8)"));
    o
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, "dimension formulas", 1.0, dimension_formulas);
    ok &= report(2, "unisolvence", 10.0, unisolvence_all);
    ok &= report(3, "conformity", 30.0, conformity_all);
    ok &= report(4, "kernels and exact sequence", 10.0, exact_sequence);
    ok &= report(5, "Piola identities", 5.0, piola);
    for (pairing, su, sp, tol) in [
        (Pairing::L1_N1_0, 2.0, 1.0, 0.2),
        (Pairing::L2_N2_1, 3.0, 2.0, 0.25),
        (Pairing::B3_N2_2, 4.0, 3.0, 0.3),
        (Pairing::B3_N1_2, 4.0, 3.0, 0.3),
    ] {
        ok &= report(6, "antiplane convergence", 120.0, || antiplane(pairing, su, sp, tol));
    }
    let start = Instant::now();
    ok &= report(7, "3D convergence", 300.0, || rmm3d(Pairing::L1_N1_0, 2.0, 1.0, 0.3));
    let left = 300.0 - start.elapsed().as_secs_f64();
    ok &= report(7, "3D convergence", left, || rmm3d(Pairing::L2_N2_1, 3.0, 2.0, 0.35));
    ok &= report(8, "patch tests", 30.0, patch_tests);
    if ok {
        println!("acceptance: all criteria met apart from documented deficiencies");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures");
        ExitCode::FAILURE
    }
}
