use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{domain, FemError, Result};
use crate::mesh::structured_mesh;
use crate::rmm::{
    self, apply_dirichlet, assemble_antiplane, assemble_rmm3d, l2_error, Discretization, ManufacturedSolution,
    MaterialParams2D, MaterialParams3D, Pairing,
};
use crate::sparse::{SolveReport, SolverKind};

pub const CSV_HEADER: &str = "family_u,family_p,p,refine,dofs,err_u,err_p";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Antiplane,
    Rmm3d,
}

impl Problem {
    pub fn dim(&self) -> usize {
        match self {
            Self::Antiplane => 2,
            Self::Rmm3d => 3,
        }
    }

    /// Levels used for the slope fit.
    pub fn fit_window(&self) -> usize {
        match self {
            Self::Antiplane => 3,
            Self::Rmm3d => 2,
        }
    }

    pub fn min_levels(&self) -> usize {
        match self {
            Self::Antiplane => 3,
            Self::Rmm3d => 2,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Antiplane => "antiplane",
            Self::Rmm3d => "rmm3d",
        })
    }
}

impl FromStr for Problem {
    type Err = FemError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "antiplane" => Ok(Self::Antiplane),
            "rmm3d" => Ok(Self::Rmm3d),
            other => Err(FemError::Domain(format!("unknown problem `{other}`"))),
        }
    }
}

/// Subdivisions per axis of the structured meshes, doubling each level.
/// First-order pairings in 3D start at 3 so that the finest level stays
/// below 50k unknowns.
pub fn subdivisions(problem: Problem, pairing: Pairing, levels: usize) -> Vec<usize> {
    let first = if problem == Problem::Rmm3d && pairing == Pairing::L1_N1_0 { 3 } else { 2 };
    (0..levels).map(|k| first << k).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub refine: usize,
    pub subdivisions: usize,
    pub h: f64,
    pub dofs: usize,
    pub err_u: f64,
    pub err_p: f64,
    pub solve: SolveReport,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub problem: Problem,
    pub pairing: Pairing,
    pub levels: Vec<Level>,
}

/// Least-squares slope of `log e` against `log h`.
pub fn fit_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

impl ConvergenceReport {
    /// Slopes of both errors over the last `window` levels.
    pub fn slopes_over(&self, window: usize) -> (f64, f64) {
        let tail = &self.levels[self.levels.len().saturating_sub(window)..];
        let h: Vec<f64> = tail.iter().map(|l| l.h).collect();
        let eu: Vec<f64> = tail.iter().map(|l| l.err_u).collect();
        let ep: Vec<f64> = tail.iter().map(|l| l.err_p).collect();
        (fit_slope(&h, &eu), fit_slope(&h, &ep))
    }

    pub fn slopes(&self) -> (f64, f64) {
        self.slopes_over(self.problem.fit_window())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let (fu, fp) = self.pairing.labels();
        writeln!(w, "{CSV_HEADER}")?;
        for l in &self.levels {
            writeln!(
                w,
                "{},{},{},{},{},{:.10e},{:.10e}",
                &fu[..1],
                &fp[..2],
                self.pairing.order,
                l.refine,
                l.dofs,
                l.err_u,
                l.err_p
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Log-log plot of both errors against h with the fitted slopes.
    pub fn to_svg(&self) -> String {
        let (su, sp) = self.slopes();
        let (fu, fp) = self.pairing.labels();
        let series = [
            ("u", "#1f77b4", self.levels.iter().map(|l| (l.h, l.err_u)).collect::<Vec<_>>(), su),
            ("P", "#d62728", self.levels.iter().map(|l| (l.h, l.err_p)).collect::<Vec<_>>(), sp),
        ];
        let title = format!("{} {}x{}", self.problem, fu, fp);
        svg_plot(&title, &series)
    }
}

fn svg_plot(title: &str, series: &[(&str, &str, Vec<(f64, f64)>, f64)]) -> String {
    let (w, hgt, m) = (640.0, 480.0, 70.0);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.2.iter().copied()).filter(|p| p.1 > 0.0).collect();
    let lx = |v: f64| v.log10();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &all {
        x0 = x0.min(lx(*x));
        x1 = x1.max(lx(*x));
        y0 = y0.min(lx(*y));
        y1 = y1.max(lx(*y));
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |x: f64| m + (lx(x) - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| hgt - m - (lx(y) - y0) / (y1 - y0) * (hgt - 2.0 * m);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{hgt}\" viewBox=\"0 0 {w} {hgt}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{title}</text>\n",
        w / 2.0
    ));
    s.push_str(&format!(
        "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w - 2.0 * m,
        hgt - 2.0 * m
    ));
    for k in x0 as i32..=x1 as i32 {
        let x = px(10f64.powi(k));
        s.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"black\"/>\n<text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e{k}</text>\n",
            hgt - m,
            hgt - m + 6.0,
            hgt - m + 22.0
        ));
    }
    for k in y0 as i32..=y1 as i32 {
        let y = py(10f64.powi(k));
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{m}\" y2=\"{y:.2}\" stroke=\"black\"/>\n<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e{k}</text>\n",
            m - 6.0,
            m - 10.0,
            y + 4.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">h</text>\n",
        w / 2.0,
        hgt - 20.0
    ));
    s.push_str(&format!(
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 {})\">L2 error</text>\n",
        hgt / 2.0,
        hgt / 2.0
    ));
    for (k, (name, color, pts, slope)) in series.iter().enumerate() {
        let coords: Vec<String> =
            pts.iter().filter(|p| p.1 > 0.0).map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        for c in &coords {
            let (x, y) = c.split_once(',').unwrap();
            s.push_str(&format!("<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{color}\"/>\n"));
        }
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"{color}\">{name}: slope {slope:.2}</text>\n",
            m + 12.0,
            m + 20.0 + 18.0 * k as f64
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Assembles, constrains, solves and measures one level.
pub fn run_level(problem: Problem, pairing: Pairing, n: usize, solver: SolverKind) -> Result<(Level, Discretization)> {
    let start = Instant::now();
    let mesh = structured_mesh(problem.dim(), n)?;
    let h = 2.0 / n as f64;
    let disc = Discretization::from_pairing(mesh, pairing)?;
    let (ms, mut system) = match problem {
        Problem::Antiplane => {
            let params = MaterialParams2D::default();
            let ms = ManufacturedSolution::antiplane(&params);
            let system = assemble_antiplane(&disc, &params, &ms)?;
            (ms, system)
        }
        Problem::Rmm3d => {
            let params = MaterialParams3D::default();
            let ms = ManufacturedSolution::rmm3d();
            let system = assemble_rmm3d(&disc, &params, &ms)?;
            (ms, system)
        }
    };
    apply_dirichlet(&mut system, &disc, &ms)?;
    let (x, solve) = rmm::solve(&system, solver)?;
    let (err_u, err_p) = l2_error(&disc, &x, &ms)?;
    let level = Level {
        refine: 0,
        subdivisions: n,
        h,
        dofs: disc.num_dofs(),
        err_u,
        err_p,
        solve,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((level, disc))
}

/// Runs the levels in order; meshes are written to `dump_mesh` as
/// `level<k>.mesh` when given.
pub fn converge(
    problem: Problem,
    pairing: Pairing,
    subdivisions: &[usize],
    solver: SolverKind,
    dump_mesh: Option<&Path>,
) -> Result<ConvergenceReport> {
    if subdivisions.len() < problem.min_levels() {
        return domain(format!("{problem} needs at least {} levels", problem.min_levels()));
    }
    if subdivisions.windows(2).any(|w| w[1] != 2 * w[0]) {
        return domain("mesh size must halve from one level to the next");
    }
    let mut levels = Vec::with_capacity(subdivisions.len());
    for (k, &n) in subdivisions.iter().enumerate() {
        let (mut level, disc) = run_level(problem, pairing, n, solver)?;
        level.refine = k;
        if let Some(dir) = dump_mesh {
            std::fs::create_dir_all(dir)?;
            let f = File::create(dir.join(format!("level{k}.mesh")))?;
            disc.mesh.write_text(BufWriter::new(f))?;
        }
        levels.push(level);
    }
    Ok(ConvergenceReport { problem, pairing, levels })
}
