use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use polytope_fem::verify::{self, Perturbation, DEFAULT_SEED};
use polytope_fem::{Pairing, Problem, ScalarFamily, SolverKind, VectorFamily};

#[derive(Parser)]
#[command(name = "polytope-fem", version, about = "Vector finite elements from polytopal templates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scalar {
    Lagrange,
    Bernstein,
}

impl From<Scalar> for ScalarFamily {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Lagrange => ScalarFamily::Lagrange,
            Scalar::Bernstein => ScalarFamily::Bernstein,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Auto,
    Cg,
    Direct,
}

impl From<Solver> for SolverKind {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Auto => SolverKind::Auto,
            Solver::Cg => SolverKind::ConjugateGradient,
            Solver::Direct => SolverKind::Direct,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the template sets, function counts and trace table of an element.
    Tabulate {
        #[arg(long)]
        family: VectorFamily,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value = "lagrange")]
        scalar: Scalar,
    },
    /// Run unisolvence, conformity, kernel, span and Piola checks.
    Verify {
        #[arg(long)]
        family: VectorFamily,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Shift the template of this function by 1e-3 before checking.
        #[arg(long, hide = true)]
        perturb_template: Option<usize>,
    },
    /// Convergence study on structured meshes of (-1,1)^d.
    Converge {
        #[arg(long)]
        problem: Problem,
        /// e.g. l1-n1_0, l2-n2_1, b3-n1_2, b3-n2_2
        #[arg(long)]
        pairing: Pairing,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        dump_mesh: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        solver: Solver,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Tabulate { family, order, dim, scalar } => {
            print!("{}", verify::tabulate_report(family, order, dim, scalar.into())?);
            Ok(true)
        }
        Command::Verify { family, order, dim, seed, perturb_template } => {
            let perturb = perturb_template.map(|f| Perturbation::uniform(f, 1e-3));
            let checks = verify::verify_element(family, order, dim, seed, perturb)?;
            for c in &checks {
                println!("{c}");
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                println!("all {} checks passed", checks.len());
                Ok(true)
            } else {
                eprintln!("failed: {}", failed.join(", "));
                Ok(false)
            }
        }
        Command::Converge { problem, pairing, levels, out, svg, dump_mesh, solver } => {
            if levels < problem.min_levels() {
                bail!("{problem} needs --levels {} or more", problem.min_levels());
            }
            let ns = verify::subdivisions(problem, pairing, levels);
            let report = verify::converge(problem, pairing, &ns, solver.into(), dump_mesh.as_deref())?;
            fs::write(&out, report.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = svg {
                fs::write(&path, report.to_svg()).with_context(|| format!("writing {}", path.display()))?;
            }
            for l in &report.levels {
                eprintln!(
                    "level {} n={} dofs={} err_u={:.4e} err_p={:.4e} ({:?}, {} it, {:.2}s)",
                    l.refine, l.subdivisions, l.dofs, l.err_u, l.err_p, l.solve.method, l.solve.iterations, l.seconds
                );
            }
            let (su, sp) = report.slopes();
            println!("slope_u {su:.3} slope_p {sp:.3}");
            if let Some(f) = verify::envelope_factor(&report) {
                println!("largest factor to the published errors {f:.2}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
